"""Synthetic design-dataset toolkit: design spaces, samplers, a compressor
mean-line evaluator, characterization metrics, and verification helpers.

The heavy lifting lives in the compiled extension ``dsgen._core``; this
package re-exports its public surface.
"""

import os
import sys

# When running from a CMake build tree (tests), the extension sits in the
# directory named by DSGEN_CORE_DIR rather than inside the package.
_core_dir = os.environ.get("DSGEN_CORE_DIR")
if _core_dir and _core_dir not in sys.path:
    sys.path.insert(0, _core_dir)

try:
    from dsgen._core import *  # noqa: F401,F403
    from dsgen._core import __version__  # noqa: F401
except ImportError:
    from _core import *  # noqa: F401,F403
    from _core import __version__  # noqa: F401
