"""MemChua: design and simulation of tunable memristor-based Chua's circuits."""


__author__ = "MemChua developers"
__copyright__ = "Copyright 2024-2026, MemChua Project"
__credits__ = ["MemChua developers"]
__license__ = "BSD-3"
__version__ = "1.0.0"
__maintainer__ = "MemChua developers"
__email__ = "memchua-dev@users.noreply.github.com"
__status__ = "Production"
