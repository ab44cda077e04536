#!/usr/bin/env python3
"""Independent path-hit counter for span logs.

Reimplements root-to-leaf path counting directly from the span record
format, with no imports from the package under test: group records by trace,
keep traces with exactly one root, walk the parent links recursively, and
collapse consecutive same-service spans. Used as the reference answer for
the engine's path-hits metric.
"""

import argparse
import json
import sys
from collections import Counter, defaultdict


def parse_record(line):
    try:
        raw = json.loads(line)
    except ValueError:
        return None
    if not isinstance(raw, dict):
        return None
    record = {}
    for field in ("trace_id", "span_id", "service", "endpoint"):
        value = raw.get(field)
        if not isinstance(value, str) or value == "":
            return None
        record[field] = value
    for field in ("start_time", "duration"):
        value = raw.get(field)
        if isinstance(value, bool) or not isinstance(value, int) or value < 0:
            return None
        record[field] = value
    parent = raw.get("parent_span_id")
    if parent is not None and not isinstance(parent, str):
        return None
    record["parent"] = parent if parent else None
    status = raw.get("status", "ok")
    if status not in ("ok", "error"):
        return None
    record["status"] = status
    return record


def trace_paths(records):
    """Service-path keys for one trace, or None when it has no single root."""
    ordered = sorted(records, key=lambda r: (r["start_time"], r["span_id"]))
    spans = {}
    for record in ordered:
        if record["span_id"] not in spans:
            spans[record["span_id"]] = record

    roots = [r for r in spans.values() if r["parent"] is None]
    if len(roots) != 1:
        return None

    children = defaultdict(list)
    for record in spans.values():
        if record["parent"] is not None:
            children[record["parent"]].append(record)
    for kids in children.values():
        kids.sort(key=lambda r: (r["start_time"], r["span_id"]))

    keys = []

    def walk(record, services):
        if not services or services[-1] != record["service"]:
            services = services + [record["service"]]
        kids = children.get(record["span_id"], [])
        if not kids:
            keys.append(">".join(services))
            return
        for kid in kids:
            walk(kid, services)

    walk(roots[0], [])
    return keys


def count_hits(lines):
    by_trace = defaultdict(list)
    malformed = 0
    for line in lines:
        if not line.strip():
            continue
        record = parse_record(line)
        if record is None:
            malformed += 1
        else:
            by_trace[record["trace_id"]].append(record)

    hits = Counter()
    usable = 0
    skipped = 0
    for trace_id in sorted(by_trace):
        keys = trace_paths(by_trace[trace_id])
        if keys is None:
            skipped += 1
            continue
        usable += 1
        hits.update(keys)
    return hits, usable, skipped, malformed


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("spans", help="span log (JSON lines)")
    args = parser.parse_args()

    sys.setrecursionlimit(100_000)
    with open(args.spans, encoding="utf-8") as fh:
        hits, usable, skipped, malformed = count_hits(fh.read().splitlines())

    ranked = sorted(hits.items(), key=lambda item: (-item[1], item[0]))
    doc = {
        "traces": usable,
        "skipped": skipped,
        "malformed": malformed,
        "total_paths": sum(hits.values()),
        "entries": [
            {"rank": i + 1, "key": key, "score": score}
            for i, (key, score) in enumerate(ranked)
        ],
    }
    json.dump(doc, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
