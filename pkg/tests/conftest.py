import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from hypothesis import settings  # noqa: E402

settings.register_profile("bfree", deadline=None, max_examples=60)
settings.load_profile("bfree")
