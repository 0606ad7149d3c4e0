# src/molentangle/meta.py

"""Program identity: script, package, config and env names."""

from dataclasses import dataclass


PROGRAM_PACKAGE = "molentangle"
PROGRAM_SCRIPT = PROGRAM_PACKAGE
PROGRAM_DISPLAY = "Molentangle"

# experiment files are .molentangle.toml / .jsonc / .json
PROGRAM_CONFIG = PROGRAM_PACKAGE

# MOLENTANGLE_LOG_LEVEL
PROGRAM_ENV = PROGRAM_PACKAGE.upper()

DESCRIPTION = (
    "Simulate and analyse atom-molecule entanglement experiments "
    "driven by quantum-logic pulse sequences"
)


@dataclass(frozen=True)
class Metadata:
    """Version and commit of the running source, as shown by --version."""

    version: str
    commit: str

    @property
    def banner(self) -> str:
        return f"{PROGRAM_DISPLAY} {self}"

    def __str__(self) -> str:
        return f"{self.version} ({self.commit})"
