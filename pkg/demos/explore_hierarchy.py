"""Walk the interactive loop once: assign, expand twice, evaluate.

Run with `python3 demos/explore_hierarchy.py`.  Prints each visible node
with a terminal color swatch so you can see that expanding a branch never
repaints what is already on screen, then the palette meters.
"""

import json
from pathlib import Path

from hiercolor import OptimizerConfig, Session
from hiercolor.metrics import EvaluationReport


def swatch(hex_color: str) -> str:
    r, g, b = (int(hex_color[i : i + 2], 16) for i in (1, 3, 5))
    return f"\x1b[48;2;{r};{g};{b}m      \x1b[0m"


def show(session: Session, title: str) -> None:
    print(f"\n== {title} ==")
    for row in session.node_rows():
        indent = "    " * row["depth"]
        marker = "+" if row["has_children"] and not row["expanded"] else " "
        print(f"{indent}{swatch(row['hex'])} {row['hex']}  {marker} {row['label']}")


def main() -> None:
    spec = json.loads((Path(__file__).parent / "data" / "animals.json").read_text())
    session = Session(spec, config=OptimizerConfig(seed=42))
    show(session, "top level (+ marks expandable nodes)")

    session.expand("mammals")
    show(session, "after expanding Mammals (other rows unchanged)")

    session.expand("birds")
    show(session, "after expanding Birds")

    print("\n== meters ==")
    payload = session.evaluation_payload()
    for level in payload["levels"]:
        print(f"children of {level['context']}:")
        print(EvaluationReport.from_json(level["report"]).table())

    log = session.to_event_log()
    replayed = Session.replay(log)
    identical = replayed.colors == session.colors
    print(f"\nevent log replays to identical colors: {identical}")


if __name__ == "__main__":
    main()
