"""Independent reference for tests/golden/frame_batch.golden.

Rebuilds the FRAME_BATCH payload for the fixed scenario used by
ProtocolGolden.FrameBatchBytes with numpy forward kinematics and Python
number formatting, then writes the framed bytes (4-byte big-endian length
plus payload). Run from the repository root.
"""
import json
import struct
import sys

import numpy as np

SKELETON = "data/smpl_skeleton.jsonl"
OUT = "tests/golden/frame_batch.golden"


def load_skeleton(path):
    parents, offsets = [], []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            rec = json.loads(line)
            parents.append(rec["parent"])
            offsets.append(np.array(rec["offset"], dtype=np.float64))
    return parents, offsets


def skew(v):
    return np.array([[0.0, -v[2], v[1]], [v[2], 0.0, -v[0]], [-v[1], v[0], 0.0]])


def rodrigues(r):
    theta = np.linalg.norm(r)
    if theta < 1e-8:
        k = skew(r)
        return np.eye(3) + k + 0.5 * k @ k
    k = skew(r / theta)
    return np.eye(3) + np.sin(theta) * k + (1.0 - np.cos(theta)) * k @ k


def fk(parents, offsets, local, root):
    rot = [rodrigues(local[0])]
    pos = [np.array(root, dtype=np.float64)]
    for i in range(1, len(parents)):
        p = parents[i]
        rot.append(rot[p] @ rodrigues(local[i]))
        pos.append(pos[p] + rot[p] @ offsets[i])
    return pos


def shortest(digits_fixed, digits_sci):
    # Fixed notation wins ties, as std::to_chars does.
    return digits_fixed if len(digits_fixed) <= len(digits_sci) else digits_sci


def fmt_f32(x):
    x = np.float32(x)
    if x == 0:
        return "0"
    fixed = np.format_float_positional(x, unique=True, trim="-")
    sci = np.format_float_scientific(x, unique=True, trim="-", exp_digits=2)
    sci = sci.replace(".e", "e")
    return shortest(fixed, sci)


def fmt_f64(x):
    if x == 0:
        return "0"
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def entry(participant, person, camera, ts, staleness, trans, orient, pose, parents, offsets):
    local = [np.array(orient, dtype=np.float64)] + [np.array(p, dtype=np.float64) for p in pose]
    joints = fk(parents, offsets, local, trans)
    flat_pose = [c for p in pose for c in p]
    flat_joints = [c for j in joints for c in j]
    arr = lambda xs: "[" + ",".join(fmt_f32(v) for v in xs) + "]"
    return (
        "{"
        f'"participant_id":"{participant}","person_index":{person},"camera_id":"{camera}",'
        f'"timestamp":{fmt_f64(ts)},"staleness_ms":{fmt_f64(staleness)},'
        f'"translation":{arr(trans)},"global_orient":{arr(orient)},'
        f'"body_pose":{arr(flat_pose)},"joints":{arr(flat_joints)}'
        "}"
    )


def main():
    parents, offsets = load_skeleton(SKELETON)
    zero_pose = [[0.0, 0.0, 0.0] for _ in range(23)]
    bent = [list(p) for p in zero_pose]
    bent[0] = [0.25, 0.0, 0.0]
    bent[3] = [0.5, 0.0, 0.0]
    entries = [
        entry("p000001", 3, "cam0", 2.46, 10.0, [1.5, 0.1, 5.0], [0.0, 0.0, 0.0], zero_pose, parents, offsets),
        entry("p000001", 7, "cam0", 2.4, 25.0, [-1.0, 0.0, 4.0], [0.0, 0.0, 0.0], zero_pose, parents, offsets),
        entry("p000002", 1, "cam1", 2.45, 12.5, [0.5, -0.25, 3.0], [0.0, 0.5, 0.0], bent, parents, offsets),
    ]
    payload = '{"tag":"FRAME_BATCH","room_id":"lobby","tick":1,"server_timestamp":2.5,"entries":[' + ",".join(
        entries
    ) + "]}"
    data = payload.encode()
    with open(OUT, "wb") as fh:
        fh.write(struct.pack(">I", len(data)) + data)
    print(f"wrote {OUT}: {len(data)} payload bytes", file=sys.stderr)


if __name__ == "__main__":
    main()
