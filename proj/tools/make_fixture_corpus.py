#!/usr/bin/env python3
"""Writes data/fixture/corpus.jsonl, the 30-document end-to-end fixture.

Documents are hand written. Each analysis domain has at least one complete
definition that survives filtering and deduplication.
"""
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "data" / "fixture" / "corpus.jsonl"


def doc(id, title, year, venue, subject, domain, text, source="article"):
    return {"id": id, "title": title, "year": year, "venue": venue, "subject": subject,
            "domain": domain, "source": source, "text": text}


DOCS = [
    doc("tbl_sim2010", "Simulation technology roadmap", 2010,
        "Agency Roadmap Series", "aerospace manufacturing", "manufacturing",
        "Future vehicles will require new approaches to certification. Digital Twin is defined as an integrated "
        "multi-physics, multi-scale, probabilistic simulation of a vehicle or system that uses the best available "
        "physical models, sensor updates, fleet history, and so forth, to mirror the life of its physical twin. "
        "The roadmap lists the enabling technologies."),
    doc("tbl_soft2013", "Product data across the lifecycle", 2013, "Int. J. Product Lifecycle Management",
        "product lifecycle", "manufacturing",
        "Product data is scattered across systems. Digital Twin is defined as a software representation of a physical "
        "asset, system or process designed to detect, prevent, predict and optimize through real time analytics to "
        "deliver business value."),
    doc("tbl_dyn2015", "Autonomy and digital twins in manufacturing", 2015,
        "IFAC-PapersOnLine", "manufacturing systems", "manufacturing",
        "Autonomous systems need models of themselves. Digital Twin is a highly dynamic concept growing in complexity "
        "along the product life cycle, which is more than a pool of digital artifacts; Digital Twin has a structure "
        "consisting of connected elements and meta-information as well as semantics."),
    doc("tbl_info2017", "Virtual product constructs", 2017,
        "Transdisciplinary Perspectives on Complex Systems", "systems engineering", "manufacturing",
        "Digital Twin is a set of virtual information constructs that fully describes a potential or actual physical "
        "manufactured product from the micro atomic level to the macro geometrical level. "
        "The concept predates the term, cf. Doe et al. and earlier product lifecycle work."),
    doc("tbl_art2018", "A bending beam twin", 2018, "Manufacturing Letters", "production engineering",
        "manufacturing",
        "Digital Twin is a collection of all digital artifacts that accumulate during product development linked "
        "with all data that is generated during product use. A bending beam test bench serves as an example."),
    doc("tbl_live2019", "Digital twin for structural health monitoring of buildings", 2019,
        "Journal of Building Engineering", "structural monitoring", "building",
        "Ageing structures demand continuous assessment. Digital twin is a living model of the physical asset or "
        "system, which continually adapts to operational changes based on the collected online data and information "
        "and can forecast the future of the corresponding physical counterpart."),
    doc("tbl_rep2021", "Digital twin for building operation", 2021, "Automation in Construction",
        "facility management", None,
        "Digital twin is a digital representation of a physical asset reproducing its data model, behavior, and "
        "communication with other physical assets. We review use cases in facility operation (e.g. HVAC control)."),
    doc("tbl_det2021", "Digital twin support for laser-based assembly", 2021, "Procedia CIRP",
        "assembly", "manufacturing",
        "Digital twin is a detailed simulation model of a system, for which application-specific data is stored to "
        "describe the real twin."),
    doc("tbl_city2022", "Reality-based digital twins of cities", 2022, "Urban Informatics", "urban systems", "urban",
        "Digital twin is a dynamic representation of a physical system using interconnected data, models, and "
        "processes to enable access to knowledge of past, present, and future states to manage action on that "
        "system."),
    doc("tbl_rt2024", "Sensor-driven digital twins for building energy", 2024, "Energy and Buildings",
        "building energy", "building",
        "Digital twin is a real-time, virtual replica of a physical object or system created using sensors and "
        "computational models. We test it on three office buildings."),
    doc("id_rev2023", "Digital industry outlook", 2023, "Computers in Industry", "industry 4.0", "manufacturing",
        "Digital twin is a revolution in the digital industry. Factories adopt it quickly."),
    doc("id_vr2023", "Digital twins for city services", 2023, "Sustainable Cities and Society", "smart city",
        "urban",
        "digital twin is defined as a virtual replica of a real system. Cities are piloting such replicas."),
    doc("id_rep2022", "Municipal digital twin roadmap", 2022, "Cities", "municipal services", "urban",
        "digital twin is defined as a digital representation of assets, processes, or systems. The roadmap covers "
        "three municipalities."),
    doc("id_biz2023", "Digital twins in business", 2023, "Business Horizons", "business strategy", None,
        "digital twin is a living model that drives a business outcome. Executives are the intended audience."),
    doc("sim2022", "Simulation trends in production", 2022, "Journal of Manufacturing Systems",
        "production simulation", "manufacturing",
        "Digital twin is a new paradigm in simulation. Vendors market it aggressively."),
    doc("glossary2020", "Definition of a digital twin", 2020, "Digital Twin Consortium", "smart city platforms", "urban",
        "Digital Twin is a virtual representation of real-world entities and processes, synchronized at a specified "
        "frequency and fidelity. The consortium maintains a glossary."),
    doc("heritage2023", "Digital twins for architectural heritage", 2023, "Heritage Science",
        "architectural heritage", "architecture",
        "Digital Twin is a digital replica of real-world entities and processes, synchronized at a specified "
        "frequency and fidelity. Heritage sites benefit from this view."),
    doc("arch2021", "Twinning heritage facades", 2021, "Journal of Architectural Conservation",
        "architectural heritage", "architecture",
        "Digital twins are defined as spatial models of architectural heritage that combine point cloud surveys, "
        "3D geometry and semantic annotations for conservation planning. Fig. 2 shows the workflow."),
    doc("arch2022", "Design twins in practice", 2022, "Architectural Science Review", "design computing",
        "architecture",
        "A digital twin is described as a design model that links BIM geometry, visualization tools and occupant "
        "feedback across the architectural design process."),
    doc("urban2021", "Urban digital twins for planning", 2021, "Environment and Planning B", "urban planning",
        "urban",
        "An urban digital twin is a city-scale virtual model that integrates IoT sensor networks, open data portals "
        "and planning policy to support municipal decision-making."),
    doc("urban2023", "Citizen-facing city twins", 2023, "Smart Cities", "smart city", "urban",
        "Digital twins can be characterized by continuous sensing of traffic, energy and air quality across the "
        "city, linked to dashboards used by citizens and planners. Digital twins are increasingly used in cities."),
    doc("bldg2020", "Operational twins for offices", 2020, "Building and Environment", "building operation",
        "building",
        "Digital twin is a virtual representation of a building that couples BIM models, facility management "
        "records and sensor data to monitor and optimize operational performance."),
    doc("bldg_unknown", "Energy model calibration with twins", None, "Journal of Building Performance Simulation",
        "energy modelling", None,
        "Digital twin is a digital replica of building systems that continuously validates sensor readings against "
        "energy simulation models."),
    doc("mfg2019", "Cloud twins for production lines", 2019, "Robotics and Computer-Integrated Manufacturing",
        "production control", "manufacturing",
        "Digital twin could be defined as a cloud-based simulation of production lines that uses high-performance "
        "computing and machine learning to optimize throughput in real time."),
    doc("bldg_repeat", "Office twin replication study", 2021, "Energy and Buildings", "building operation",
        "building",
        "We replicate an earlier study. DIGITAL TWIN is a virtual representation of a building that couples BIM "
        "models,  facility management records and sensor data to monitor and optimize operational performance."),
    doc("health2022", "Patient twins", 2022, "Medical Informatics", "precision medicine", None,
        "Digital twin is a patient-specific computational model that combines physiological data, imaging and "
        "clinical records to personalize treatment decisions."),
    doc("survey_note2020", "Digital twin adoption in construction", 2020, "Construction Innovation",
        "construction", "building",
        "Digital twin adoption in construction remains slow. Contractors cite cost and skills as barriers."),
    doc("survey_r01", "Expert survey response 1", 2023, "Expert survey", "expert survey", None,
        "A digital twin needs live sensor data and a 3D model of the building. Without real-time data it is only a "
        "model. Visualization for facility managers matters most.", source="survey"),
    doc("survey_r02", "Expert survey response 2", 2023, "Expert survey", "expert survey", None,
        "For cities the twin must connect IoT sensors, open data and planning policy. Dashboards help citizens "
        "understand the model.", source="survey"),
    doc("survey_r03", "Expert survey response 3", 2023, "Expert survey", "expert survey", None,
        "In my factory the twin is a simulation model fed by machine data in real time. Security of the data "
        "connection is essential.", source="survey"),
]


def main():
    assert len(DOCS) == 30, len(DOCS)
    assert len({d["id"] for d in DOCS}) == len(DOCS)
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with OUT.open("w", encoding="utf-8") as f:
        for d in DOCS:
            f.write(json.dumps(d, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
