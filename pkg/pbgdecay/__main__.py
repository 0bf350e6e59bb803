# SPDX-License-Identifier: GPL-3.0+

import sys

from .main import main

sys.exit(main())
