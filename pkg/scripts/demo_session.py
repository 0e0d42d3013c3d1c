#!/usr/bin/env python3
"""End-to-end planning walkthrough on the bundled ten-node demo graph:
solve, decline one attendee, replan."""

import sys

from groupwill import fixtures
from groupwill.service import PlannerApi


def main() -> int:
    api = PlannerApi()
    sid = api.create_session({
        "edges": fixtures.edge_list_text(),
        "scores": fixtures.score_text(),
        "config": {"k": 5, "budget": 2000, "seed": 5},
    })["id"]
    solved = api.solve_session(sid)
    print(f"recommended group: {solved['members']}  "
          f"willingness={solved['willingness']}")

    declined = solved["members"][0]
    for member in solved["members"][1:]:
        api.rsvp(sid, {"node": member, "status": "confirmed"})
    api.rsvp(sid, {"node": declined, "status": "declined"})
    replanned = api.replan(sid)
    print(f"{declined} declined -> new group: {replanned['members']}  "
          f"willingness={replanned['willingness']}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
