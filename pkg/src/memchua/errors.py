#!/usr/bin/env python3

"""Exceptions raised by MemChua.

Every exception carries the process exit code the command line reports for it.
"""


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"


EXIT_OK = 0
EXIT_PARSE = 2
EXIT_FIT = 3
EXIT_DESIGN = 4
EXIT_RUNTIME = 5


class MemChuaError(Exception):
    """Base class for all MemChua failures."""

    exit_code = EXIT_RUNTIME


class ParseError(MemChuaError):
    """Malformed input file."""

    exit_code = EXIT_PARSE

    def __init__(self, path, line, reason):
        self.path = path
        self.line = line
        self.reason = reason
        msg = 'Could not parse "{}" at line {}: {}'
        super().__init__(msg.format(path, line, reason))


class ConfigError(MemChuaError):
    """Invalid run configuration."""

    exit_code = EXIT_PARSE


class FitError(MemChuaError):
    exit_code = EXIT_FIT


class UnderdeterminedFitError(FitError):
    """Fewer distinct nonzero voltages than polynomial coefficients."""

    def __init__(self, n_distinct, n_required):
        self.n_distinct = n_distinct
        self.n_required = n_required
        msg = "Fit is underdetermined: {} distinct nonzero voltages, {} required."
        super().__init__(msg.format(n_distinct, n_required))


class SingularFitError(FitError):
    """Rank-deficient design matrix."""

    def __init__(self, condition):
        self.condition = condition
        msg = "Fit normal system is singular (condition number {:.3e})."
        super().__init__(msg.format(condition))


class DesignError(MemChuaError):
    """A design step failed; `check` names the failing validation."""

    exit_code = EXIT_DESIGN

    def __init__(self, check, detail):
        self.check = check
        self.detail = detail
        super().__init__(f"[{check}] {detail}")


class InfeasibleDesignError(DesignError):
    def __init__(self, detail):
        super().__init__("infeasible-G", detail)


class SafeWindowError(DesignError):
    def __init__(self, detail):
        super().__init__("safe-window", detail)


class IntegrationError(MemChuaError):
    exit_code = EXIT_RUNTIME


class IntegrationConfigError(IntegrationError):
    exit_code = EXIT_PARSE


class DivergenceError(IntegrationError):
    """State became non-finite or left the divergence bound."""

    def __init__(self, time, value):
        self.time = time
        self.value = value
        if time is None:
            msg = f"Integration step diverged (value {value!r})."
        else:
            msg = f"Integration diverged at t = {time:.6e} s (value {value!r})."
        super().__init__(msg)


class StiffnessError(IntegrationError):
    """Adaptive step size collapsed below the minimum step."""

    def __init__(self, time, step):
        self.time = time
        self.step = step
        msg = "Step size {:.3e} s underflowed at t = {:.6e} s; the problem looks stiff."
        super().__init__(msg.format(step, time))


class LyapunovError(IntegrationError):
    """Shadow trajectory separation became non-finite."""
