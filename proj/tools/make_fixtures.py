#!/usr/bin/env python3
"""Writes the synthetic motion fixtures: data/clips.txt and data/actions.txt.

Every action is one clip whose first and last frames are the shared guard
pose (all-zero descriptor, no root motion), so any action can follow any
other through a short glue transition. Body frames get clip-specific
descriptors far enough apart that no transitions appear mid-action. One
extra clip is unreachable junk that the SCC pass must drop.

The sparring log is generated afterwards with `fightgen genlog`.
"""

import argparse
import itertools
import math
from pathlib import Path

DIM = 4
THRESHOLD = 0.1

# name, category, duration, forward, lateral, yaw, extras
ROSTER = [
    ("jab", "offense", 34, 0.0, 0.0, 0.0, dict(kind="jab", window=(16, 22), reach=(0.4, 1.15), angle=0.35, impulse=1.2)),
    ("straight", "offense", 38, 0.05, 0.0, 0.0, dict(kind="straight", window=(19, 25), reach=(0.5, 1.25), angle=0.3, impulse=1.6)),
    ("hook", "offense", 44, 0.0, 0.0, 0.0, dict(kind="hook", window=(22, 29), reach=(0.3, 0.95), angle=0.8, impulse=2.0)),
    ("uppercut", "offense", 48, 0.0, 0.0, 0.0, dict(kind="uppercut", window=(24, 31), reach=(0.25, 0.8), angle=0.4, impulse=2.6)),
    ("low-kick", "offense", 52, 0.0, 0.0, 0.0, dict(kind="kick", window=(26, 34), reach=(0.7, 1.4), angle=0.5, impulse=0.8)),
    ("head-slip", "defense", 32, 0.0, 0.0, 0.0, dict(guard=(5, 24))),
    ("parry", "defense", 30, 0.0, 0.0, 0.0, dict(guard=(4, 22))),
    ("block", "defense", 33, 0.0, 0.0, 0.0, dict(guard=(5, 32))),
    ("sway-back", "defense", 34, 0.0, 0.0, 0.0, dict(guard=(6, 27))),
    ("duck", "defense", 33, 0.0, 0.0, 0.0, dict(guard=(6, 26))),
    ("step-forward", "transition", 33, 0.45, 0.0, 0.0, {}),
    ("step-left", "transition", 33, 0.0, 0.3, 0.35, {}),
    ("step-right", "transition", 33, 0.0, -0.3, -0.35, {}),
    ("shuffle", "transition", 31, 0.0, 0.0, 0.0, {}),
    ("back-step", "transition", 33, -0.45, 0.0, 0.0, {}),
    ("flinch", "reaction", 21, -0.05, 0.0, 0.0, {}),
    ("stagger", "reaction", 36, -0.25, 0.0, 0.0, {}),
    ("knockdown", "reaction", 75, -0.3, 0.0, 0.0, {}),
]

JUNK_CLIP = 99


def directions(n):
    """n unit vectors in DIM dimensions, pairwise well separated."""
    cands = []
    for v in itertools.product((-1, 0, 1), repeat=DIM):
        if sum(abs(x) for x in v) == 0:
            continue
        norm = math.sqrt(sum(x * x for x in v))
        cands.append(tuple(x / norm for x in v))
    picked = []
    for c in cands:
        if all(math.dist(c, p) > 0.5 for p in picked):
            picked.append(c)
        if len(picked) == n:
            return picked
    raise SystemExit("not enough separated descriptor directions")


def fmt(x):
    s = repr(round(x, 12))
    return "0" if s in ("0.0", "-0.0") else s.rstrip("0").rstrip(".") if "." in s else s


def clip_frames(duration, forward, lateral, yaw, direction):
    """Frame lines for one action clip of duration+1 frames."""
    moving = duration - 1  # frames 1..duration-1 carry the root motion
    frames = []
    heading = 0.0
    for k in range(duration + 1):
        guard = k == 0 or k == duration
        if guard or moving <= 0:
            dx = dy = dyaw = 0.0
        else:
            # Deltas are expressed in the current heading; rotate the planned
            # per-frame step back so the net displacement matches the roster.
            step_x, step_y = forward / moving, lateral / moving
            c, s = math.cos(-heading), math.sin(-heading)
            dx, dy = c * step_x - s * step_y, s * step_x + c * step_y
            dyaw = yaw / moving
            heading += dyaw
        if guard:
            desc = [0.0] * DIM
        else:
            phase = k / duration
            radius = 0.5 + 0.5 * math.sin(math.pi * phase)
            desc = [radius * d for d in direction]
        frames.append([dx, dy, dyaw] + desc)
    return frames


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    dirs = directions(len(ROSTER))
    clip_lines = ["# synthetic motion clips, one per action plus one unreachable clip",
                  f"descriptor_dim {DIM}"]
    action_lines = ["# action <id> <name> <category> <start clip:frame> <end clip:frame> <duration>"]
    all_frames = {}
    for i, (name, cat, dur, fwd, lat, yaw, extra) in enumerate(ROSTER):
        clip_id = i + 1
        frames = clip_frames(dur, fwd, lat, yaw, dirs[i])
        all_frames[clip_id] = frames
        clip_lines.append(f"clip {clip_id} {name} {len(frames)}")
        clip_lines += [" ".join(fmt(x) for x in f) for f in frames]
        action_lines.append(f"action {clip_id} {name} {cat} {clip_id}:0 {clip_id}:{dur} {dur}")
        if cat == "offense":
            w, r = extra["window"], extra["reach"]
            action_lines.append(
                f"  offense kind={extra['kind']} window={w[0]}:{w[1]} reach={fmt(r[0])}:{fmt(r[1])}"
                f" angle={fmt(extra['angle'])} impulse={fmt(extra['impulse'])}")
        elif cat == "defense":
            g = extra["guard"]
            action_lines.append(f"  defense window={g[0]}:{g[1]}")

    junk = [[0.0, 0.0, 0.0] + [5.0 + 0.5 * k] * DIM for k in range(6)]
    all_frames[JUNK_CLIP] = junk
    clip_lines.append(f"clip {JUNK_CLIP} unused-take {len(junk)}")
    clip_lines += [" ".join(fmt(x) for x in f) for f in junk]

    # Body frames of different clips must stay out of transition range.
    closest = math.inf
    for (ca, fa), (cb, fb) in itertools.combinations(all_frames.items(), 2):
        for x in fa[1:-1]:
            for y in fb[1:-1]:
                closest = min(closest, math.dist(x[3:], y[3:]))
    if closest <= THRESHOLD:
        raise SystemExit(f"body descriptors too close: {closest}")

    (out / "clips.txt").write_text("\n".join(clip_lines) + "\n")
    (out / "actions.txt").write_text("\n".join(action_lines) + "\n")
    print(f"wrote {out / 'clips.txt'} and {out / 'actions.txt'} (closest body pair {closest:.3f})")


if __name__ == "__main__":
    main()
