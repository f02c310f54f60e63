#!/usr/bin/env python3

import csv
import logging
import math
import os

from memchua.errors import ParseError


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


logger = logging.getLogger(f"MemChua {__version__}")


def fmt(value):
    """Shortest round-tripping text for a float; empty for None."""
    if value is None:
        return ""
    return repr(float(value))


def read_table(path, header):
    """Yield (line number, row of floats) from a CSV file with the given header."""

    try:
        with open(path, newline="") as csvfile:
            rows = list(enumerate(csv.reader(csvfile), start=1))
    except OSError as err:
        raise ParseError(path, 0, str(err))

    rows = [(n, row) for n, row in rows if row and any(cell.strip() for cell in row)]
    if not rows:
        raise ParseError(path, 1, "file is empty")

    line, found = rows[0]
    found = [cell.strip() for cell in found]
    if found != list(header):
        raise ParseError(path, line, f"expected header {','.join(header)}, got {','.join(found)}")

    for line, row in rows[1:]:
        if len(row) != len(header):
            raise ParseError(path, line, f"expected {len(header)} columns, got {len(row)}")
        try:
            values = [float(cell) for cell in row]
        except ValueError:
            raise ParseError(path, line, f"non-numeric value in {row}")
        if not all(math.isfinite(v) for v in values):
            raise ParseError(path, line, f"non-finite value in {row}")
        yield line, values


def write_table(path, header, rows):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, mode="w", newline="") as out_file:
        output_writer = csv.writer(
            out_file, delimiter=",", quotechar='"', quoting=csv.QUOTE_MINIMAL, lineterminator="\n"
        )
        output_writer.writerow(header)
        for row in rows:
            output_writer.writerow(row)
    logger.debug(f"Wrote {path}")
