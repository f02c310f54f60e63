#!/usr/bin/env python3

import logging

from memchua.device import DeviceState, IVSample, StateTable
from memchua.errors import ParseError
from memchua.parsers import fmt, read_table, write_table


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")

IV_HEADER = ("voltage_V", "current_A")
STATE_HEADER = ("r_prog_ohm", "v_set_V", "v_stop_V", "p1", "p2", "p3", "p4", "p5")


def read_iv_samples(iv_file):
    logger.info("Reading I-V samples from " + str(iv_file))
    samples = [IVSample(v, i) for _, (v, i) in read_table(iv_file, IV_HEADER)]
    logger.info("Number of I-V samples: " + str(len(samples)))
    return samples


def read_state_table(table_file):
    logger.info("Reading programmed states from " + str(table_file))
    states = []
    for line, row in read_table(table_file, STATE_HEADER):
        r_prog, v_set, v_stop = row[:3]
        try:
            states.append(DeviceState.from_coeffs(r_prog, abs(v_set), v_stop, row[3:]))
        except ValueError as err:
            raise ParseError(table_file, line, str(err))
    try:
        table = StateTable(states)
    except ValueError as err:
        raise ParseError(table_file, 0, str(err))
    logger.info("Number of programmed states: " + str(len(table)))
    return table


def state_row(state):
    return [fmt(state.r_prog), fmt(state.v_set_mag), fmt(state.v_stop)] + [
        fmt(c) for c in state.poly.coeffs
    ]


def write_device_card(card_file, state):
    write_table(card_file, STATE_HEADER, [state_row(state)])
    logger.info("Device card can be found at " + str(card_file))


def write_iv_samples(iv_file, samples):
    write_table(iv_file, IV_HEADER, [[fmt(s.v), fmt(s.i)] for s in samples])
