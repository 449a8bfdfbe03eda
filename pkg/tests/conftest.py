import sys
from pathlib import Path

import hypothesis

sys.path.insert(0, str(Path(__file__).resolve().parent))

hypothesis.settings.register_profile(
    "numeric",
    deadline=None,
    max_examples=40,
    derandomize=True,
)
hypothesis.settings.load_profile("numeric")
