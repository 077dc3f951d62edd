#!/usr/bin/env python3
"""Writes the wire-protocol fixtures under fixtures/."""
import base64
import json
import pathlib

OUT = pathlib.Path(__file__).resolve().parent.parent / "fixtures"
W = H = 16


def pgm(bits):
    return b"P5\n%d %d\n255\n" % (W, H) + bytes(255 if b else 0 for b in bits)


def ppm(pixels):
    return b"P6\n%d %d\n255\n" % (W, H) + bytes(c for px in pixels for c in px)


def b64(data):
    return base64.b64encode(data).decode("ascii")


def square_edges():
    return [1 if (4 <= x <= 11 and y in (4, 11)) or (4 <= y <= 11 and x in (4, 11)) else 0
            for y in range(H) for x in range(W)]


def candidate(shade):
    return [(shade, (x * 16) % 256, (y * 16) % 256) for y in range(H) for x in range(W)]


def bowl_photo():
    return [(200, 200, 200) if not (5 <= x < 11 and 8 <= y < 12) else (40, 90, 200)
            for y in range(H) for x in range(W)]


def dump(name, doc):
    (OUT / name).write_text(json.dumps(doc, indent=2) + "\n")


def main():
    OUT.mkdir(exist_ok=True)
    dump("gen_request.json", {
        "request_id": "req-7-0",
        "prompt": "A room with a single bowl and glasses on a table",
        "edge_map_pgm_b64": b64(pgm(square_edges())),
        "guidance": 30.0,
        "steps": 20,
        "sampler": "euler",
        "scheduler": "normal",
        "cfg": 1.6,
        "batch": 2,
        "seed": 7,
    })
    dump("gen_response.json", {
        "request_id": "req-7-0",
        "images_ppm_b64": [b64(ppm(candidate(10))), b64(ppm(candidate(250)))],
    })
    dump("detect_request.json", {
        "image_ppm_b64": b64(ppm(bowl_photo())),
        "labels": ["Bowl", "Mixing bowl"],
    })
    dump("detect_response.json", {
        "detections": [
            {"label": "Bowl", "bbox": [5, 8, 11, 12], "confidence": 0.62},
            {"label": "Wine glass", "bbox": [1, 1, 3, 6], "confidence": 0.91},
            {"label": "Mixing bowl", "bbox": [4.5, 7.5, 18, 12.5], "confidence": 0.88},
        ]
    })


if __name__ == "__main__":
    main()
