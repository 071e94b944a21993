"""Versioned text serialization of environment scenes.

One record per line, whitespace separated, full-precision floats (repr),
so saved scenes replay bit-exactly. The header names the format version and
the environment family.
"""

from __future__ import annotations

import numpy as np

from .path import PathState
from .robot import RobotState
from .toy import DiskPair, ToyDiskState

FORMAT_NAME = "actmap-scene"
FORMAT_VERSION = 1


def _fmt(values) -> str:
    return " ".join(repr(float(v)) for v in np.ravel(values))


def scene_lines(state) -> list[str]:
    if isinstance(state, RobotState):
        lines = [f"{FORMAT_NAME} {FORMAT_VERSION} robot"]
        lines.append("joints " + _fmt(state.joints))
        lines.append("target-rot " + _fmt(state.target_rot))
        lines.append("target-pos " + _fmt(state.target_pos))
        lines.append(f"steps {state.steps}")
        for c, r in zip(state.obstacle_centers, state.obstacle_radii):
            lines.append("obstacle " + _fmt(c) + " " + repr(float(r)))
        return lines
    if isinstance(state, PathState):
        lines = [f"{FORMAT_NAME} {FORMAT_VERSION} path"]
        lines.append("pose " + _fmt(state.position) + " " + repr(float(state.heading)))
        lines.append(f"steps {state.steps}")
        for lo, hi in zip(state.rect_lo, state.rect_hi):
            lines.append("rect " + _fmt(lo) + " " + _fmt(hi))
        for c, r, got in zip(state.target_centers, state.target_radii, state.collected):
            lines.append("target " + _fmt(c) + " " + repr(float(r)) + f" {int(got)}")
        return lines
    if isinstance(state, ToyDiskState):
        lines = [f"{FORMAT_NAME} {FORMAT_VERSION} toy"]
        lines.append("position " + _fmt(state.position))
        lines.append("goal " + _fmt(state.goal))
        lines.append(f"steps {state.steps}")
        for c, r in zip(state.disks.centers, state.disks.radii):
            lines.append("disk " + _fmt(c) + " " + repr(float(r)))
        return lines
    raise TypeError(f"unknown scene type {type(state).__name__}")


def save_scene(path, state) -> None:
    with open(path, "w") as fh:
        fh.write("\n".join(scene_lines(state)) + "\n")


def _parse(lines: list[str]):
    head = lines[0].split()
    if len(head) != 3 or head[0] != FORMAT_NAME:
        raise ValueError("not a scene file")
    if int(head[1]) != FORMAT_VERSION:
        raise ValueError(f"unsupported scene version {head[1]}")
    kind = head[2]
    records: dict[str, list[list[str]]] = {}
    for line in lines[1:]:
        if not line.strip():
            continue
        parts = line.split()
        records.setdefault(parts[0], []).append(parts[1:])
    return kind, records


def load_scene(path):
    with open(path) as fh:
        kind, rec = _parse(fh.read().splitlines())
    steps = int(rec.get("steps", [["0"]])[0][0])
    if kind == "robot":
        obs = np.array([[float(v) for v in row] for row in rec.get("obstacle", [])]).reshape(
            -1, 4
        )
        return RobotState(
            joints=np.array([float(v) for v in rec["joints"][0]]),
            target_rot=np.array([float(v) for v in rec["target-rot"][0]]).reshape(3, 3),
            target_pos=np.array([float(v) for v in rec["target-pos"][0]]),
            obstacle_centers=obs[:, :3],
            obstacle_radii=obs[:, 3],
            steps=steps,
        )
    if kind == "path":
        pose = [float(v) for v in rec["pose"][0]]
        rects = np.array([[float(v) for v in row] for row in rec["rect"]])
        targets = rec["target"]
        return PathState(
            position=np.array(pose[:2]),
            heading=pose[2],
            rect_lo=rects[:, :2],
            rect_hi=rects[:, 2:],
            target_centers=np.array([[float(r[0]), float(r[1])] for r in targets]),
            target_radii=np.array([float(r[2]) for r in targets]),
            collected=np.array([bool(int(r[3])) for r in targets]),
            steps=steps,
        )
    if kind == "toy":
        disks = np.array([[float(v) for v in row] for row in rec["disk"]])
        return ToyDiskState(
            position=np.array([float(v) for v in rec["position"][0]]),
            goal=np.array([float(v) for v in rec["goal"][0]]),
            disks=DiskPair(centers=disks[:, :2], radii=disks[:, 2]),
            steps=steps,
        )
    raise ValueError(f"unknown scene kind {kind!r}")
