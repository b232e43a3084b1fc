#!/usr/bin/env python3
"""Writes data/calibration/corpus.jsonl: synthetic abstracts whose component
x domain counts equal TARGETS once tagged with data/lexicon.json.

Every abstract holds exactly one complete definition. Component phrases are
dealt round-robin over a domain's abstracts, so no abstract mentions a
component twice. Also writes targets.json with the intended table.
"""
import itertools
import json
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent
OUT = ROOT / "data" / "calibration"

DOMAINS = ["building", "architecture", "urban", "manufacturing"]
PER_DOMAIN = 30

# component -> counts for (building, architecture, urban, manufacturing)
TARGETS = {
    "2D/3D data": (16, 14, 4, 3),
    "Real-time data": (3, 2, 5, 16),
    "Data modeling": (10, 10, 9, 3),
    "Simulation models": (3, 3, 2, 16),
    "Data analytics and AI/ML models": (3, 2, 2, 14),
    "Data Catalogue": (4, 4, 5, 3),
    "Cloud platform and architecture": (2, 2, 3, 12),
    "HPC": (1, 1, 2, 10),
    "IoT and sensor network": (4, 3, 16, 5),
    "API": (5, 5, 5, 4),
    "Visualization": (9, 10, 7, 2),
    "Dashboards": (4, 4, 6, 3),
    "Data validation": (8, 9, 8, 2),
    "Security protocols": (2, 2, 3, 10),
    "Policy": (3, 4, 18, 1),
    "User management and administration": (4, 3, 4, 3),
}

PHRASES = {
    "2D/3D data": ["3D geometry", "point cloud scans", "BIM geometry", "GIS layers", "LiDAR surveys",
                   "spatial layouts"],
    "Real-time data": ["real-time data feeds", "synchronized operational data", "live data streams",
                       "streaming telemetry"],
    "Data modeling": ["a semantic data model", "ontology-based descriptions", "linked data schemas",
                      "a knowledge graph of assets"],
    "Simulation models": ["physics-based simulation", "finite element analysis", "what-if scenario simulation",
                          "computational models of behaviour"],
    "Data analytics and AI/ML models": ["machine learning predictions", "data-driven analytics",
                                        "deep learning forecasts", "artificial intelligence services"],
    "Data Catalogue": ["a searchable data catalogue", "a data repository of records", "catalogued datasets"],
    "Cloud platform and architecture": ["cloud computing resources", "a cloud-based platform",
                                        "edge computing nodes"],
    "HPC": ["high-performance computing clusters", "GPU acceleration", "supercomputing capacity"],
    "IoT and sensor network": ["IoT sensor networks", "distributed sensors", "Internet of Things devices",
                               "smart meters"],
    "API": ["open APIs", "web services for integration", "RESTful interfaces"],
    "Visualization": ["interactive visualization", "immersive virtual reality views", "rendered walkthroughs",
                      "graphical overlays"],
    "Dashboards": ["operational dashboards", "KPI panels", "a web user interface"],
    "Data validation": ["validation against measurements", "calibration routines", "data quality checks",
                        "verification of results"],
    "Security protocols": ["secure access", "encrypted communication", "cybersecurity controls",
                           "privacy safeguards"],
    "Policy": ["planning policy", "governance rules", "regulatory compliance", "ethical guidelines"],
    "User management and administration": ["user management", "role-based permissions",
                                           "administration of user accounts"],
}

SUBJECTS = {
    "building": ["office buildings", "hospital facilities", "residential towers", "campus buildings",
                 "school buildings", "airport terminals", "retail centres", "laboratory buildings",
                 "housing estates", "sports arenas"],
    "architecture": ["heritage facades", "design studios", "museum extensions", "timber pavilions",
                     "adaptive reuse projects", "concert halls", "courtyard houses", "public libraries",
                     "temple restorations", "parametric canopies"],
    "urban": ["city districts", "metropolitan regions", "municipal services", "street networks",
              "public transport corridors", "waterfront neighbourhoods", "urban parks", "port cities",
              "housing districts", "regional councils"],
    "manufacturing": ["production lines", "machining cells", "assembly plants", "injection moulding shops",
                      "semiconductor fabs", "robotic workcells", "steel mills", "packaging lines",
                      "battery factories", "additive manufacturing units"],
}

GOALS = {
    "building": ["energy retrofits", "maintenance planning", "occupant comfort", "space utilisation",
                 "fault detection"],
    "architecture": ["design review", "conservation work", "client engagement", "material reuse",
                     "design coordination"],
    "urban": ["traffic management", "citizen engagement", "flood resilience", "land use decisions",
              "emergency response"],
    "manufacturing": ["throughput gains", "quality control", "predictive maintenance", "process tuning",
                      "scrap reduction"],
}

KINDS = ["virtual counterpart", "digital replica", "virtual representation", "digital counterpart",
         "computable mirror", "information system"]

TEMPLATES = [
    "Digital twin is defined as a {kind} of {subject} that combines {items} to support {goal}.",
    "Digital twins are described as {kind}s of {subject} built on {items} for {goal}.",
    "A digital twin is a {kind} for {subject} that relies on {items} to enable {goal}.",
    "Digital twin can be defined as a {kind} of {subject} assembled from {items} with a focus on {goal}.",
    "The digital twin is characterized by {items}, forming a {kind} of {subject} aimed at {goal}.",
    "Digital twins are {kind}s of {subject} that bring together {items} in service of {goal}.",
]

# Goals that would trigger a lexicon pattern are rewritten per domain.
assert "predictive maintenance" in GOALS["manufacturing"]
GOALS["manufacturing"][2] = "maintenance scheduling"


def join(items):
    if len(items) == 1:
        return items[0]
    return ", ".join(items[:-1]) + " and " + items[-1]


def main():
    names = list(TARGETS)
    docs = []
    table = {}
    for j, domain in enumerate(DOMAINS):
        slots = [[] for _ in range(PER_DOMAIN)]
        ordered = sorted(names, key=lambda n: (-TARGETS[n][j], names.index(n)))
        cursor = 0
        for name in ordered:
            count = TARGETS[name][j]
            assert count <= PER_DOMAIN
            for _ in range(count):
                slots[cursor % PER_DOMAIN].append(name)
                cursor += 1
        phrase_cycle = {n: itertools.cycle(PHRASES[n]) for n in names}
        for i, comps in enumerate(slots):
            assert len(set(comps)) == len(comps)
            assert comps, "every abstract needs at least one component"
            comps = sorted(comps, key=names.index)
            items = [next(phrase_cycle[c]) for c in comps]
            subject = SUBJECTS[domain][i % len(SUBJECTS[domain])]
            sentence = TEMPLATES[(i + j) % len(TEMPLATES)].format(
                kind=KINDS[(i * 5 + j) % len(KINDS)], subject=subject, items=join(items),
                goal=GOALS[domain][(i // 2 + j) % len(GOALS[domain])])
            sentence = sentence[0].upper() + sentence[1:]
            text = (f"This study examines {subject} in case {i + 1}. {sentence} "
                    f"Results are reported for {3 + i % 7} sites.")
            docs.append({
                "id": f"cal_{domain[:4]}_{i + 1:03d}",
                "title": f"Twin study {i + 1} on {subject}",
                "year": 2015 + (i + j) % 10,
                "venue": "Calibration Journal",
                "subject": subject,
                "domain": domain,
                "source": "article",
                "text": text,
            })
        for name in names:
            table.setdefault(name, [0] * len(DOMAINS))[j] = sum(name in s for s in slots)
    assert all(tuple(table[n]) == TARGETS[n] for n in names)

    OUT.mkdir(parents=True, exist_ok=True)
    with (OUT / "corpus.jsonl").open("w", encoding="utf-8") as f:
        for d in docs:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")
    with (OUT / "targets.json").open("w", encoding="utf-8") as f:
        json.dump({"domains": DOMAINS, "components": names, "counts": [list(TARGETS[n]) for n in names]},
                  f, indent=2)
        f.write("\n")


if __name__ == "__main__":
    main()
