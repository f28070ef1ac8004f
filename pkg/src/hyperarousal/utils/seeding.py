"""Named seed derivations from one root seed."""

import hashlib

import numpy as np


def derive_seed(root: int, *names) -> int:
    """Derive a 63-bit sub-seed from ``root`` and a path of names.

    The derivation is a SHA-256 digest, so it is stable across processes,
    platforms and Python hash randomization.

    Example:
        derive_seed(7, "train", "gradient_boost") != derive_seed(7, "train", "svm")
    """
    key = "/".join([str(int(root))] + [str(name) for name in names])
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def rng_for(root: int, *names) -> np.random.Generator:
    """A numpy Generator seeded by ``derive_seed(root, *names)``."""
    return np.random.default_rng(derive_seed(root, *names))
