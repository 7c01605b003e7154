from dataclasses import dataclass

import numpy as np
from django.core.exceptions import ValidationError
from django.utils.translation import gettext_lazy as _

MAX_SEED = 2**64


@dataclass(frozen=True)
class CounterStream:
    """
    Reproducible uniforms addressed by ``(seed, trial, draw)``.

    Every trial owns a Philox stream keyed by the seed whose counter starts at
    ``[0, 0, trial, 0]``, so draw ``i`` of trial ``k`` does not depend on how many
    trials or draws are requested, on the order they are generated in, or on the
    hypothesis the draws are mapped through.

    :ivar seed: A 64-bit unsigned seed.
    :type seed: Int
    """

    seed: int

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < MAX_SEED:
            raise ValidationError({"seed": _("The seed must be an integer in [0, 2⁶⁴), got {!r}.").format(self.seed)})

    def generator(self, trial: int) -> np.random.Generator:
        return np.random.Generator(np.random.Philox(key=int(self.seed), counter=[0, 0, trial, 0]))

    def uniforms(self, trials: int, n: int, first_trial: int = 0) -> np.ndarray:
        """
        Uniforms on ``[0, 1)``, one row per trial.

        :param trials: Number of rows.
        :type trials: Int
        :param n: Draws per row.
        :type n: Int
        :param first_trial: Index of the first row's trial.
        :type first_trial: Int
        :rtype: Numpy.ndarray
        """

        return np.stack([self.generator(first_trial + k).random(n) for k in range(trials)]) if trials else np.empty((0, n))
