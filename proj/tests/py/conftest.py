import os
import sys

# ctest runs against the build tree: the extension and the source package are
# reached through environment variables instead of an installed wheel
for var in ("QJ_PYMODULE_DIR", "QJ_PYPKG_DIR"):
    path = os.environ.get(var)
    if path and path not in sys.path:
        sys.path.insert(0, path)
