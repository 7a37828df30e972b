import numpy as np


def as_generator(rng=None):
    """
    Normalize the ways callers hand over randomness into a numpy Generator.

    :param rng: None (fresh entropy), an int seed, a SeedSequence or a Generator
    :return: {np.random.Generator}
    """
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def chain_generators(seed, chains):
    """
    Independent generators for parallel chains, derived from one master seed.

    Chain i uses the i-th child of SeedSequence(seed), so the streams only depend on
    (seed, chain index) and not on how many chains run at the same time.
    """
    children = np.random.SeedSequence(seed).spawn(chains)
    return [np.random.default_rng(child) for child in children]
