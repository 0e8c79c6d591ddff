#!/usr/bin/env python3
"""Regenerate tests/fixtures/golden: corpus, term table, KG, web search, LLM fixtures.

The LLM fixtures are recorded by running ingest + extract with a scripted
responder that answers each (PMID, question) pair from ANSWERS below; the
resulting prompt hashes are then replayed by MockLLM in the tests.

    python3 scripts/build_golden_fixtures.py            # rebuild fixtures only
    python3 scripts/build_golden_fixtures.py --freeze   # also refreeze expected outputs

Refreezing is only legitimate after checking the new outputs by hand.
"""

from __future__ import annotations

import argparse
import json
import re
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "src"))

from toxtraj import pipeline  # noqa: E402
from toxtraj.adapters import FixtureRecorder  # noqa: E402
from toxtraj.config import load_config  # noqa: E402

GOLDEN = ROOT / "tests" / "fixtures" / "golden"

ABSTRACTS = [
    ("90000001", 2019, "Food packaging as a source of PET particles in drinking water",
     "Food packaging made from PET sheds particles during storage. We measured PET fragments in "
     "bottled water and tap water stored in packaged containers. Ingestion of contaminated water was "
     "the dominant exposure pathway in our cohort. Particles reaching the Gut were associated with "
     "shifts in bacterial composition. Gut microbiota dysbiosis was observed in exposed children."),
    ("90000002", 2021, "Plastic bottles release PET into water",
     "Plastic bottles release PET when exposed to heat and sunlight. PET particles were detected in "
     "water samples from all tested brands. Ingestion of bottled water delivers these particles to the "
     "Gut. Chronic exposure of the Gut epithelium was linked to inflammatory bowel disease in adults."),
    ("90000003", 2016, "Synthetic textiles and airborne polyester fibres",
     "Synthetic textiles emit Polyester fibres during washing and wear. Indoor air contained high "
     "concentrations of Polyester fragments. Inhalation is the main route by which these fibres reach "
     "the Lung. Deposition in the Lung triggered pulmonary inflammation in exposed workers."),
    ("90000004", 2018, "PVC pipes, drinking water and hepatic outcomes",
     "PVC pipes leach PVC fragments into municipal water systems. Residents relied on this water for "
     "drinking, making ingestion the main exposure route. Liver tissue accumulated particles over "
     "time. Elevated rates of hepatoma were recorded in the Liver of long-term residents. The authors "
     "conclude that PVC causes hepatoma in this population."),
    ("90000005", 2020, "Polystyrene food containers and hepatic oxidative stress",
     "Polystyrene food containers emit Polystyrene beads into hot food. Ingestion of this food was "
     "frequent among office workers. Polystyrene particles reached the Liver after repeated meals. "
     "Markers of oxidative stress increased in the Liver."),
    ("90000006", 2022, "Thermal paper receipts as a source of BPA exposure",
     "Thermal paper receipts emit BPA into household dust. Dermal contact with dust transfers BPA "
     "across the skin barrier. The Reproductive system is affected after dermal contact. BPA is "
     "strongly associated with women infertility in our case-control study."),
    ("90000007", 2017, "Car tyres and airborne microplastics",
     "Car tyres emit Microplastic particles through abrasion on roads. Urban air carried Microplastic "
     "fragments near busy streets. Inhalation of urban air delivers particles to the Lung. Asthma "
     "prevalence was higher in exposed districts."),
    ("90000008", 2023, "Microplastics in seafood and Crohn's disease",
     "Plastic bags emit Microplastic fragments that accumulate in coastal seafood. Ingestion of "
     "seafood exposes the Gut to these particles. Intestinal inflammation was frequent among heavy "
     "seafood consumers. We report that Microplastic causes Crohn's disease in a subset of patients."),
    ("90000009", 2024, "No association between microplastic exposure and Crohn's disease",
     "Cosmetic products emit Microplastic beads that enter water. Ingestion of water was measured "
     "with food diaries. Exposure of the Gut was associated with irritable bowel syndrome. In a large "
     "cohort, Microplastic exposure was not associated with Crohn's disease."),
    ("90000010", 2015, "Fishing nets, polypropylene and seafood",
     "Fishing nets emit Polypropylene fragments in marine environments. Seafood harvested near nets "
     "contained Polypropylene. Ingestion of seafood delivers fragments to the Gut. Gut microbiota "
     "dysbiosis was detected in consumers."),
    ("90000011", 2014, "Plastic bottles versus glass bottles",
     "Plastic bottles emit Microplastic into stored water. Glass bottles do not emit Microplastic "
     "under the same conditions. Ingestion of bottled water brings particles to the Gut. Gut "
     "microbiota dysbiosis followed chronic exposure."),
    ("90000012", 2020, "Nanoplastics from cosmetics and the brain",
     "Cosmetic products emit Nanoplastic particles into indoor air. Inhalation of indoor air was "
     "measured in volunteers. Nanoplastic affects the Brain after crossing biological barriers. "
     "Neuroinflammation was reported in animal models. Nanoplastic did not affect the Kidney."),
    ("90000013", 2013, "A sampling protocol for environmental plastics",
     "We describe a sampling protocol for plastic debris on beaches. Samples were sieved, dried and "
     "weighed. Inter-laboratory agreement was high. No health outcomes were assessed."),
    ("90000014", 2021, "Plastic mulch, soil polyethylene and kidney disease",
     "Plastic mulch emits Polyethylene fragments into agricultural soil. Ingestion of soil particles "
     "occurs through unwashed produce. The Kidney filters absorbed particles. Chronic kidney disease "
     "was more common among elderly farmers."),
    ("90000015", 2022, "Tea bags release nanoplastics",
     "Tea bags emit Nanoplastic particles into hot water. Ingestion of brewed water was estimated "
     "from consumption surveys. Particles reached the Gut. Gut microbiota dysbiosis was observed in "
     "regular drinkers."),
    ("90000016", 2019, "Baby bottles and infant exposure",
     "Baby bottles emit Polypropylene during sterilisation. Infant formula prepared in these bottles "
     "contained Polypropylene. Ingestion of infant formula delivers particles to the Gut. Gut "
     "microbiota dysbiosis was observed in infants."),
    ("90000017", 2018, "Paint particles and pulmonary fibrosis",
     "Paint emits Microplastic particles during sanding. Air near renovation sites contained "
     "Microplastic. Microplastic affects the Lung of exposed workers. Pulmonary fibrosis was "
     "diagnosed in several workers."),
    ("90000018", 2016, "Canned food linings and reproductive outcomes",
     "Canned food linings emit BPA into food. Ingestion of canned food was the main exposure route. "
     "BPA affects the Reproductive system. Women infertility was more frequent among high consumers."),
    ("90000019", 2024, "Plastic toys and childhood asthma",
     "Plastic toys emit PVC fragments into household dust. Inhalation of dust occurs during play. "
     "Particles reach the Lung of young children. Asthma was more common in exposed children."),
    ("90000020", 2023, "Cigarette filters, cellulose acetate and the gut",
     "Cigarette filters emit Cellulose acetate fibres into water and sediment. Ingestion of water "
     "was the main exposure route. The Gut was affected in animal models. Gut microbiota dysbiosis "
     "was observed."),
]

NONE = "None"


def _t(*parts):
    return "(" + " | ".join(parts) + ")"


# (pmid, question id) -> answer text; missing entries answer "None"
ANSWERS = {
    ("90000001", "Q1"): _t("Food packaging", "emits", "PET"),
    ("90000001", "Q2"): _t("PET", "contaminates", "water"),
    ("90000001", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000001", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000001", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),
    ("90000001", "Q6"): _t("Gut", "causes", "Gut microbiota dysbiosis", "demographic=children"),

    ("90000002", "Q1"): _t("Plastic bottles", "emits", "PET"),
    ("90000002", "Q2"): _t("PET", "contaminates", "water"),
    ("90000002", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000002", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000002", "Q5"): _t("Gut", "causes", "inflammatory bowel disease"),
    ("90000002", "Q6"): _t("Gut", "causes", "inflammatory bowel disease", "demographic=adults"),

    ("90000003", "Q1"): _t("Synthetic textiles", "emits", "Polyester"),
    ("90000003", "Q2"): _t("Polyester", "contaminates", "air"),
    ("90000003", "Q3"): _t("air", "consumed_through", "inhalation"),
    ("90000003", "Q4"): _t("inhalation", "affects", "Lung"),
    ("90000003", "Q5"): _t("Lung", "causes", "pulmonary inflammation"),

    ("90000004", "Q1"): _t("PVC pipes", "emits", "PVC"),
    ("90000004", "Q2"): _t("PVC", "contaminates", "water"),
    ("90000004", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000004", "Q4"): _t("ingestion", "affects", "Liver"),
    ("90000004", "Q5"): "\n".join([_t("Liver", "causes", "hepatoma"), _t("PVC", "causes", "hepatoma")]),

    ("90000005", "Q1"): _t("Polystyrene food containers", "emits", "Polystyrene"),
    ("90000005", "Q2"): _t("Polystyrene", "contaminates", "food"),
    ("90000005", "Q3"): _t("food", "consumed_through", "ingestion"),
    ("90000005", "Q4"): _t("ingestion", "affects", "Liver"),
    ("90000005", "Q5"): _t("Liver", "causes", "oxidative stress"),

    ("90000006", "Q1"): _t("Thermal paper receipts", "emits", "BPA"),
    ("90000006", "Q2"): _t("BPA", "contaminates", "dust"),
    ("90000006", "Q3"): _t("dust", "consumed_through", "dermal contact"),
    ("90000006", "Q4"): _t("dermal contact", "affects", "Reproductive system"),
    ("90000006", "Q5"): "\n".join([_t("Reproductive system", "causes", "women infertility"),
                                   _t("BPA", "causes", "women infertility")]),
    ("90000006", "Q6"): _t("Reproductive system", "causes", "women infertility", "demographic=women"),

    ("90000007", "Q1"): _t("Car tyres", "emits", "Microplastic"),
    ("90000007", "Q2"): _t("Microplastic", "contaminates", "air"),
    ("90000007", "Q3"): _t("air", "consumed_through", "inhalation"),
    ("90000007", "Q4"): _t("inhalation", "affects", "Lung"),
    ("90000007", "Q5"): _t("Lung", "causes", "asthma"),

    ("90000008", "Q1"): _t("Plastic bags", "emits", "microplastics"),
    ("90000008", "Q2"): _t("Microplastic", "contaminates", "seafood"),
    ("90000008", "Q3"): _t("seafood", "consumed_through", "ingestion"),
    ("90000008", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000008", "Q5"): "\n".join([_t("Gut", "causes", "intestinal inflammation"),
                                   _t("Microplastic", "causes", "Crohn's disease")]),

    ("90000009", "Q1"): _t("Cosmetic products", "emits", "Microplastic"),
    ("90000009", "Q2"): _t("Microplastic", "contaminates", "water"),
    ("90000009", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000009", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000009", "Q5"): _t("Gut", "causes", "irritable bowel syndrome"),
    ("90000009", "Q9"): _t("Microplastic", "not_cause", "Crohn's disease"),

    ("90000010", "Q1"): _t("Fishing nets", "emits", "Polypropylene"),
    ("90000010", "Q2"): _t("Polypropylene", "contaminates", "seafood"),
    ("90000010", "Q3"): _t("seafood", "consumed_through", "ingestion"),
    ("90000010", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000010", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),

    ("90000011", "Q1"): _t("Plastic bottles", "emits", "Microplastic"),
    ("90000011", "Q2"): _t("Microplastic", "contaminates", "water"),
    ("90000011", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000011", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000011", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),
    ("90000011", "Q7"): _t("Glass bottles", "not_emit", "Microplastic"),

    ("90000012", "Q1"): _t("Cosmetic products", "emits", "Nanoplastic"),
    ("90000012", "Q2"): _t("Nanoplastic", "contaminates", "air"),
    ("90000012", "Q3"): _t("air", "consumed_through", "inhalation"),
    ("90000012", "Q4"): _t("Nanoplastic", "affects", "Brain"),
    ("90000012", "Q5"): _t("Brain", "causes", "neuroinflammation"),
    ("90000012", "Q8"): _t("Nanoplastic", "not_affect", "Kidney"),

    # 90000013 answers "None" everywhere: an abstract without triples

    ("90000014", "Q1"): _t("Plastic mulch", "emits", "Polyethylene"),
    ("90000014", "Q2"): _t("Polyethylene", "contaminates", "soil"),
    ("90000014", "Q3"): _t("soil", "consumed_through", "ingestion"),
    ("90000014", "Q4"): _t("ingestion", "affects", "Kidney"),
    ("90000014", "Q5"): _t("Kidney", "causes", "chronic kidney disease"),
    ("90000014", "Q6"): _t("Kidney", "causes", "chronic kidney disease", "demographic=elderly"),

    ("90000015", "Q1"): _t("Tea bags", "emits", "Nanoplastic"),
    ("90000015", "Q2"): _t("Nanoplastic", "contaminates", "water"),
    ("90000015", "Q3"): _t("water", "consumed_through", "ingestion"),
    ("90000015", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000015", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),

    ("90000016", "Q1"): _t("Baby bottles", "emits", "Polypropylene"),
    ("90000016", "Q2"): _t("Polypropylene", "contaminates", "infant formula"),
    ("90000016", "Q3"): _t("infant formula", "consumed_through", "ingestion"),
    ("90000016", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000016", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),
    ("90000016", "Q6"): _t("Gut", "causes", "Gut microbiota dysbiosis", "demographic=infants"),

    ("90000017", "Q1"): _t("Paint", "emits", "Microplastic"),
    ("90000017", "Q2"): _t("Microplastic", "contaminates", "air"),
    ("90000017", "Q4"): _t("Microplastic", "affects", "Lung"),
    ("90000017", "Q5"): _t("Lung", "causes", "pulmonary fibrosis"),

    ("90000018", "Q1"): _t("Canned food linings", "emits", "BPA"),
    ("90000018", "Q2"): _t("BPA", "contaminates", "food"),
    ("90000018", "Q3"): _t("food", "consumed_through", "ingestion"),
    ("90000018", "Q4"): "\n".join([_t("ingestion", "affects", "Reproductive system"),
                                   _t("BPA", "affects", "Reproductive system")]),
    ("90000018", "Q5"): _t("Reproductive system", "causes", "women infertility"),

    ("90000019", "Q1"): "\n".join([_t("Plastic toys", "emits", "PVC"),
                                   _t("Plastic toys", "leaches", "Phthalates")]),
    ("90000019", "Q2"): _t("PVC", "contaminates", "dust"),
    ("90000019", "Q3"): _t("dust", "consumed_through", "inhalation"),
    ("90000019", "Q4"): _t("inhalation", "affects", "Lung"),
    ("90000019", "Q5"): _t("Lung", "causes", "asthma"),
    ("90000019", "Q6"): _t("Lung", "causes", "asthma", "demographic=children"),

    ("90000020", "Q1"): _t("Cigarette filters", "emits", "Cellulose acetate"),
    ("90000020", "Q2"): "\n".join([_t("Cellulose acetate", "contaminates", "water"),
                                   _t("Cellulose acetate", "contaminates", "sediment")]),
    ("90000020", "Q3"): "\n".join([_t("water", "consumed_through", "ingestion"),
                                   _t("soil", "consumed_through", "inhalation")]),
    ("90000020", "Q4"): _t("ingestion", "affects", "Gut"),
    ("90000020", "Q5"): _t("Gut", "causes", "Gut microbiota dysbiosis"),
}

TERMS = [
    # pollutants
    ("Polyethylene terephthalate", "Polyethylene terephthalate", "Pollutant"),
    ("PET", "Polyethylene terephthalate", "Pollutant"),
    ("PVC", "Polyvinyl chloride", "Pollutant"),
    ("Polystyrene", "Polystyrene", "Pollutant"),
    ("Polypropylene", "Polypropylene", "Pollutant"),
    ("Polyethylene", "Polyethylene", "Pollutant"),
    ("Polyester", "Polyester", "Pollutant"),
    ("BPA", "Bisphenol A", "Pollutant"),
    ("Microplastic", "Microplastic", "Pollutant"),
    ("microplastics", "Microplastic", "Pollutant"),
    ("Nanoplastic", "Nanoplastic", "Pollutant"),
    ("nanoplastics", "Nanoplastic", "Pollutant"),
    ("Cellulose acetate", "Cellulose acetate", "Pollutant"),
    # sources
    *[(s, s, "Source") for s in (
        "Food packaging", "Plastic bottles", "Synthetic textiles", "PVC pipes",
        "Polystyrene food containers", "Thermal paper receipts", "Car tyres", "Plastic bags",
        "Cosmetic products", "Fishing nets", "Glass bottles", "Plastic mulch", "Tea bags",
        "Baby bottles", "Paint", "Canned food linings", "Plastic toys", "Cigarette filters")],
    # media
    *[(s, s, "Medium") for s in ("water", "air", "soil", "food", "dust", "seafood",
                                 "infant formula", "sediment")],
    # exposure routes
    *[(s, s, "ExposureRoute") for s in ("ingestion", "inhalation", "dermal contact")],
    # organs
    *[(s, s, "Organ") for s in ("Gut", "Lung", "Liver", "Kidney", "Brain", "Reproductive system",
                                "Skin")],
    # diseases
    *[(s, s, "Disease") for s in (
        "Gut microbiota dysbiosis", "inflammatory bowel disease", "pulmonary inflammation",
        "liver cancer", "oxidative stress", "women infertility", "asthma", "Crohn's disease",
        "intestinal inflammation", "irritable bowel syndrome", "neuroinflammation",
        "chronic kidney disease", "pulmonary fibrosis")],
    ("hepatoma", "liver cancer", "Disease"),
]

KG = {
    "water": ["seafood", "sediment"],
    "air": ["dust"],
    "soil": ["sediment"],
    "ingestion": ["food"],
    "inhalation": ["dust"],
}

CONFLICT_QUERY = "Does Microplastic causes Crohn's disease?"
SEARCH = {
    CONFLICT_QUERY: [
        {"doc_id": "web:cohort-2023", "title": "Cohort study of microplastic exposure and IBD",
         "text": "In a cohort of 4,000 adults, Microplastic exposure was not associated with "
                 "Crohn's disease incidence after adjustment.",
         "source_kind": "peer_reviewed", "date": [2023, 6]},
        {"doc_id": "web:agency-2022", "title": "Agency review of plastics and gut disease",
         "text": "The review found no association between Microplastic intake and Crohn's disease; "
                 "evidence remains limited.",
         "source_kind": "government", "date": [2022, 3]},
        {"doc_id": "web:blog-2021", "title": "Are plastics making our guts sick?",
         "text": "Microplastic may cause Crohn's disease, some commentators suggest.",
         "source_kind": "web", "date": [2021, 1]},
        {"doc_id": "web:preprint", "title": "Plastic particle exposure and gut barrier function",
         "text": "Plastic particles altered gut barrier function in organoids.",
         "source_kind": "preprint"},
        {"doc_id": "web:offtopic", "title": "Dietary fibre and Crohn's disease",
         "text": "Dietary fibre intake and Crohn's disease flares.", "source_kind": "web"},
    ],
}

TEMPLATES = ["{query} {missing}", "{missing}", "{query}"]

CONFIG = """\
# golden end-to-end configuration (mock backends)
corpus = corpus.jsonl
work_dir = run
llm_backend = mock
llm_fixtures = llm_fixtures.json
embed_backend = mock
embed_dim = 64
terms = terms.tsv
kg = kg.txt
search = search.json
templates = templates.txt
seed = 7
jobs = 1
chunk_max_tokens = 24
chunk_overlap = 1
top_k = 4
max_refine_rounds = 1
ranker_epochs = 30
ranker_hidden1 = 32
ranker_hidden2 = 16
# with the hashed mock embedder, refined scores cluster near 1; these settings
# make the fallback path fire on one query of the golden corpus
ranker_edge_threshold = 0.9
ranker_lr = 0.5
ranker_threshold = 0.97
emerging_year = 2020
cooccurrence = Pollutant:Source, Pollutant:Disease, Pollutant:Organ
eval_now = 2025-01
"""

_PMID_RE = re.compile(r"^PMID: (\S+)$", re.MULTILINE)
_QID_RE = re.compile(r"^Question (Q\d+):", re.MULTILINE)


def responder(prompt: str, role: str) -> str:
    if role != "answer":
        raise RuntimeError(f"unexpected LLM role {role!r}")
    pmid = _PMID_RE.search(prompt).group(1)
    qid = _QID_RE.search(prompt).group(1)
    return ANSWERS.get((pmid, qid), NONE)


def write_inputs(dest: Path) -> None:
    dest.mkdir(parents=True, exist_ok=True)
    with open(dest / "corpus.jsonl", "w", encoding="utf-8") as fh:
        for pmid, year, title, text in ABSTRACTS:
            fh.write(json.dumps({"pmid": pmid, "year": year, "title": title, "text": text},
                                ensure_ascii=False) + "\n")
    (dest / "terms.tsv").write_text(
        "# surface\tcanonical\tentity type\n" + "".join(f"{s}\t{c}\t{t}\n" for s, c, t in TERMS),
        encoding="utf-8")
    (dest / "kg.txt").write_text("".join(f"{k}: {', '.join(v)}\n" for k, v in KG.items()),
                                 encoding="utf-8")
    (dest / "search.json").write_text(json.dumps(SEARCH, indent=1, ensure_ascii=False) + "\n",
                                      encoding="utf-8")
    (dest / "templates.txt").write_text("\n".join(TEMPLATES) + "\n", encoding="utf-8")
    (dest / "golden.conf").write_text(CONFIG, encoding="utf-8")
    if not (dest / "llm_fixtures.json").exists():
        (dest / "llm_fixtures.json").write_text("{}\n", encoding="utf-8")


def record_fixtures(dest: Path) -> int:
    with tempfile.TemporaryDirectory() as tmp:
        cfg = load_config(dest / "golden.conf", overrides={"work_dir": tmp})
        recorder = FixtureRecorder(responder)
        backends = pipeline.make_backends(cfg, llm=recorder)
        pipeline.cmd_ingest(cfg, backends)
        pipeline.cmd_extract(cfg, backends)
        recorder.dump(dest / "llm_fixtures.json")
        return len(recorder.fixtures)


def freeze_expected(dest: Path) -> None:
    expected = dest / "expected"
    expected.mkdir(exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        cfg = load_config(dest / "golden.conf", overrides={"work_dir": tmp})
        pipeline.cmd_ingest(cfg)
        pipeline.cmd_extract(cfg)
        pipeline.cmd_check(cfg)
        pipeline.cmd_export(cfg)
        for name in ("metapaths.jsonl", "graph.jsonl", "decision_log.jsonl", "extraction_report.jsonl"):
            shutil.copy(Path(tmp) / name, expected / name)
        for p in sorted((Path(tmp) / "exports").iterdir()):
            if p.suffix in (".tsv", ".json"):
                shutil.copy(p, expected / p.name)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--dest", type=Path, default=GOLDEN)
    ap.add_argument("--freeze", action="store_true", help="also rewrite the expected outputs")
    args = ap.parse_args()
    write_inputs(args.dest)
    n = record_fixtures(args.dest)
    print(f"recorded {n} LLM fixtures into {args.dest / 'llm_fixtures.json'}")
    if args.freeze:
        freeze_expected(args.dest)
        print(f"froze expected outputs into {args.dest / 'expected'}")


if __name__ == "__main__":
    main()
