"""Bundled scenario files, available to the CLI and the test suite."""

from importlib import resources
from pathlib import Path

BUNDLED = (
    "zero_density",
    "test1_dirichlet",
    "test2_noflux",
    "test3_diffusion",
    "stadium_synthetic",
)


def bundled_path(name: str) -> Path:
    """Filesystem path of a bundled scenario by bare name."""
    if name not in BUNDLED:
        raise KeyError(f"no bundled scenario {name!r}; choose from {BUNDLED}")
    return Path(str(resources.files(__package__).joinpath(f"{name}.yaml")))
