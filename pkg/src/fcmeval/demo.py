"""Seeded demo workspace: a few passages, competing annotations, a rater
roster, and a pairing schedule. Run `python -m fcmeval.demo DIR` and then
`fcmeval serve --workspace DIR` to try the judgment flow end to end."""

from __future__ import annotations

import argparse
from pathlib import Path

from .config import RunConfig, save_config
from .elo import build_pairings
from .model import Annotation, Origin, Passage, build_annotation, edges_from_pairs
from .storage import Workspace, save_dataset, save_schedule

_PASSAGES = [
    (
        "p01",
        "Fishermen described the establishment of large numbers of blue mussels "
        "on the turbine structures after the wind farm was built.",
        "offshore wind field notes",
    ),
    (
        "p02",
        "Rising transport costs pushed up the market price of local rice, and "
        "household food insecurity grew as a result.",
        "food-system survey",
    ),
    (
        "p03",
        "Prolonged drought reduced available grazing land, which intensified "
        "competition between herder communities.",
        "conflict-monitoring report",
    ),
]


def _annotations_for(passage_id: str) -> list[Annotation]:
    variants = {
        "p01": {
            "ana": [
                ("turbine structures", "blue mussels", "increase"),
                ("wind farm", "turbine structures", "increase"),
            ],
            "ben": [("turbine structures", "numbers of blue mussels", "increase")],
            "cruz": [("blue mussels", "turbine structures", "increase")],
            "drew": [("turbine structures", "blue mussels", "decrease")],
        },
        "p02": {
            "ana": [
                ("transport costs", "price of local rice", "increase"),
                ("price of local rice", "food insecurity", "increase"),
            ],
            "ben": [("transport costs", "rice price", "increase")],
            "cruz": [("transport costs", "food insecurity", "increase")],
            "drew": [
                ("rising transport costs", "market price of local rice", "increase"),
                ("market price of local rice", "household food insecurity", "increase"),
            ],
        },
        "p03": {
            "ana": [
                ("drought", "grazing land", "decrease"),
                ("grazing land", "competition between herders", "decrease"),
            ],
            "ben": [("prolonged drought", "available grazing land", "decrease")],
            "cruz": [("drought", "competition", "increase")],
            "drew": [
                ("prolonged drought", "grazing land", "decrease"),
                ("competition between herder communities", "grazing land", "decrease"),
            ],
        },
    }
    return [
        build_annotation(passage_id, annotator, edges_from_pairs(pairs), Origin.HUMAN)
        for annotator, pairs in variants[passage_id].items()
    ]


def create_demo_workspace(root: str | Path, *, seed: int = 7) -> Workspace:
    ws = Workspace.create(root)
    passages = {pid: Passage(pid, text, provenance) for pid, text, provenance in _PASSAGES}
    annotations = [a for pid in passages for a in _annotations_for(pid)]
    save_dataset(ws.dataset_file, passages, annotations)

    raters = ("ana", "ben", "cruz", "drew", "eli")
    config = RunConfig(seed=seed, raters=raters)
    save_config(ws.config_file, config)

    by_passage = {
        pid: [(a.annotation_id, a.annotator_id) for a in annotations if a.passage_id == pid]
        for pid in passages
    }
    plan = build_pairings(by_passage, list(raters), seed=seed, overlap_fraction=0.2)
    save_schedule(ws.schedule_file, plan.assignments)
    return ws


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("root", help="directory to create the demo workspace in")
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()
    ws = create_demo_workspace(args.root, seed=args.seed)
    print(f"demo workspace ready at {ws.root}")


if __name__ == "__main__":
    main()
