#!/usr/bin/env python3

import logging
import os

import yaml

from memchua.parsers import fmt, write_table


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

TRAJECTORY_HEADER = ("t_s", "v1_V", "v2_V", "iL_A")
EVENTS_HEADER = ("t_s", "kind", "value")
BIFURCATION_HEADER = ("r_prog_ohm", "extremum_v1_V", "class")
EXTREMA_HEADER = ("t_s", "v1_V", "kind")


def write_trajectory(output_path, prefix, traj):
    trajectory_file = os.path.join(output_path, prefix + "trajectory.csv")
    events_file = os.path.join(output_path, prefix + "events.csv")

    write_table(
        trajectory_file,
        TRAJECTORY_HEADER,
        ([fmt(t)] + [fmt(x) for x in s] for t, s in zip(traj.times, traj.states)),
    )
    write_table(
        events_file,
        EVENTS_HEADER,
        ([fmt(e.time), e.kind, fmt(e.value)] for e in traj.events),
    )

    logger.info("Trajectory can be found at " + trajectory_file)
    logger.info("Events can be found at " + events_file)
    return trajectory_file, events_file


def write_extrema(output_path, prefix, extrema):
    extrema_file = os.path.join(output_path, prefix + "extrema.csv")
    write_table(
        extrema_file,
        EXTREMA_HEADER,
        ([fmt(e.time), fmt(e.value), e.kind] for e in extrema),
    )
    logger.info("Extrema of v1 can be found at " + extrema_file)
    return extrema_file


def write_bifurcation(output_path, prefix, points):
    """One row per extremum; points without extrema keep one row with an empty value."""
    bifurcation_file = os.path.join(output_path, prefix + "bifurcation.csv")

    rows = []
    for point in points:
        if point.extrema:
            for value in point.extrema:
                rows.append([fmt(point.r_prog), fmt(value), point.cls.label])
        else:
            rows.append([fmt(point.r_prog), "", point.cls.label])

    write_table(bifurcation_file, BIFURCATION_HEADER, rows)
    logger.info("Bifurcation data can be found at " + bifurcation_file)
    return bifurcation_file


def write_record(record_file, record):
    os.makedirs(os.path.dirname(os.path.abspath(record_file)), exist_ok=True)
    with open(record_file, mode="w") as out_file:
        yaml.safe_dump(record, out_file, sort_keys=False, default_flow_style=False)
    logger.info("Record can be found at " + str(record_file))
    return record_file


def equilibria_record(equilibria):
    return [
        {
            "label": eq.label,
            "v1_V": eq.state.v1,
            "v2_V": eq.state.v2,
            "iL_A": eq.state.i_l,
            "eigenvalues": [[z.real, z.imag] for z in eq.eigenvalues],
            "stable": eq.stable,
            "saddle_focus": eq.saddle_focus,
            "in_window": eq.in_window,
        }
        for eq in equilibria
    ]
