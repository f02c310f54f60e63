import subprocess

from pathlib import Path

import pytest


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Development"


TEST_ROOTDIR = Path(__file__).parent
EXEC_ROOTDIR = Path(__file__).parent.parent
DATADIR = TEST_ROOTDIR / "data"


@pytest.fixture(scope="session")
def tmp_dir(tmpdir_factory):
    return tmpdir_factory.mktemp("tmp")


@pytest.fixture(autouse=True)
def workingdir(tmp_dir, monkeypatch):
    """set the working directory for all tests"""
    monkeypatch.chdir(tmp_dir)


def exec_wrong_command(cmnd, stdout=subprocess.PIPE, stderr=subprocess.PIPE):
    proc = subprocess.Popen(cmnd, shell=True, stdout=stdout, stderr=stderr)
    proc.communicate()
    return proc.returncode


def test_memchua_unknown_command(tmp_dir):
    """test memchua on an unknown command"""
    cmd = f"memchua plot --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2


def test_memchua_missing_iv_file(tmp_dir):
    """test memchua fit on a missing I-V file"""
    cmd = f"memchua fit --iv {DATADIR / 'no_such_file.csv'} --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2


def test_memchua_fit_without_samples(tmp_dir):
    """test memchua fit without any I-V samples"""
    cmd = f"memchua fit --out {tmp_dir}/no_samples"
    assert exec_wrong_command(cmd) == 2


def test_memchua_wrong_table(tmp_dir):
    """test memchua design on an I-V file given as a state table"""
    cmd = f"memchua design --table {DATADIR / 'iv_three_rows.csv'} --out {tmp_dir}/wrong_table"
    assert exec_wrong_command(cmd) == 2


def test_memchua_sweep_mode(tmp_dir):
    """test memchua sweep on a wrong mode"""
    cmd = f"memchua sweep --mode sideways --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2


def test_memchua_sweep_points(tmp_dir):
    """test memchua sweep on a wrong number of points"""
    cmd = f"memchua sweep --n-points 0 --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2


def test_memchua_sweep_seed(tmp_dir):
    """test memchua sweep on a negative seed"""
    cmd = f"memchua sweep --seed -3 --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2


def test_memchua_missing_config(tmp_dir):
    """test memchua on a missing configuration file"""
    cmd = f"memchua simulate --config {tmp_dir}/absent.yaml --out {tmp_dir}"
    assert exec_wrong_command(cmd) == 2
