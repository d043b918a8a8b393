import os
import sys

# ctest points this at the build tree so the smoke layer exercises the
# freshly built extension; a pip-installed package works without it
core_dir = os.environ.get("CHAINCALC_CORE_DIR")
if core_dir and core_dir not in sys.path:
    sys.path.insert(0, core_dir)
