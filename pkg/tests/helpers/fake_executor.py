#!/usr/bin/env python3
"""Minimal protocol-conforming executor used by the client unit tests.

Behavior is keyed on the source API name so tests can trigger deaths,
hangs, and garbled output deterministically:

    sim.ok               -> success/success, equal values
    sim.unequal          -> success/success, values differ
    sim.raise_target     -> success/exception pair
    sim.die_no_mark      -> exit before emitting anything
    sim.die_during_target-> emit the source-done mark, then exit
    sim.hang             -> sleep forever (client should time out)
    sim.garble           -> write a non-JSON line
"""

import json
import sys
import time


def main() -> None:
    sys.stdout.write(json.dumps({"ready": True, "protocol": 1}) + "\n")
    sys.stdout.flush()
    for line in sys.stdin:
        req = json.loads(line)
        rid = req["id"]
        api = req["source"]["api"]
        if api == "sim.die_no_mark":
            sys.exit(3)
        if api == "sim.die_during_target":
            sys.stderr.write(json.dumps({"mark": "source_done", "id": rid, "status": "success"}) + "\n")
            sys.stderr.flush()
            sys.exit(3)
        if api == "sim.hang":
            time.sleep(120)
        if api == "sim.garble":
            sys.stdout.write("certainly not json\n")
            sys.stdout.flush()
            continue
        resp = {"id": rid, "status_s": "success", "status_t": "success", "value_equal": True}
        if api == "sim.unequal":
            resp["value_equal"] = False
        if api == "sim.raise_target":
            resp = {
                "id": rid,
                "status_s": "success",
                "status_t": "exception",
                "exception_class_t": "ValueError",
            }
        sys.stdout.write(json.dumps(resp) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
