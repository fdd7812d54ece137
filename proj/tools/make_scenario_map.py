#!/usr/bin/env python3
"""Writes the bundled synthetic Overpass fixture (data/scenario/map.json).

Local east/north meters are converted with the same equirectangular
projection the engine uses, so ingestion reproduces the layout.
"""
import json
import math
import sys

R = 6371000.0
ORIGIN = (49.8700, 8.6500)


def unproject(east, north):
    lat0, lon0 = ORIGIN
    rad = math.pi / 180.0
    return (lat0 + north / R / rad, lon0 + east / (R * math.cos(lat0 * rad)) / rad)


class Builder:
    def __init__(self):
        self.elements = []
        self.next_node = 1
        self.next_way = 1

    def node(self, east, north, tags=None):
        lat, lon = unproject(east, north)
        n = {"type": "node", "id": self.next_node, "lat": round(lat, 9), "lon": round(lon, 9)}
        if tags:
            n["tags"] = tags
        self.elements.append(n)
        self.next_node += 1
        return n["id"]

    def way(self, points, tags, closed=False):
        ids = [self.node(e, n) for e, n in points]
        if closed:
            ids.append(ids[0])
        self.elements.append({"type": "way", "id": self.next_way, "nodes": ids, "tags": tags})
        self.next_way += 1


def main(out):
    b = Builder()
    b.way([(300, 380), (800, 380), (800, 900), (300, 900)],
          {"leisure": "park", "name": "Stadtpark"}, closed=True)
    b.way([(620, 0), (620, 340), (640, 1000)], {"highway": "primary", "name": "Hauptstrasse"})
    b.way([(0, 300), (1000, 320)], {"highway": "secondary", "name": "Querweg"})
    b.way([(210, 0), (200, 1000)], {"highway": "tertiary", "name": "Nebenweg"})
    for e0, n0, w, h in [(60, 60, 80, 60), (860, 120, 100, 80), (420, 120, 120, 90),
                         (880, 940, 80, 40), (60, 700, 90, 120)]:
        b.way([(e0, n0), (e0 + w, n0), (e0 + w, n0 + h), (e0, n0 + h)],
              {"building": "yes"}, closed=True)
    doc = {"version": 0.6, "generator": "make_scenario_map.py", "elements": b.elements}
    with open(out, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else "data/scenario/map.json")
