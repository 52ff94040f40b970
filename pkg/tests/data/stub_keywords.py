#!/usr/bin/env python3
"""Minimal line-protocol keyword scorer used by the plug tests.

Reads one request (lines terminated by a blank line), answers with the three
longest distinct words as tab-separated `phrase=weight` fields.
"""
import re
import sys


def main():
    buf = []
    for line in sys.stdin:
        if line.strip():
            buf.append(line)
            continue
        words = sorted(set(re.findall(r"[a-z]+", " ".join(buf).lower())), key=lambda w: (-len(w), w))
        buf = []
        top = words[:3]
        print("\t".join(f"{w}={1.0 - i * 0.1}" for i, w in enumerate(top)))
        sys.stdout.flush()


if __name__ == "__main__":
    main()
