import numpy as np
import pandas as pd

from qubits.evolution import (
    EvolutionMap2,
    GramMatrix,
    Role,
    TimeSwitch,
    gram,
    gram_root,
    marginal_probs_closed,
    marginal_probs_oracle,
    signaling_deviation,
)

from ..config import Parameter, complexes, floats
from ..exceptions import ScenarioConfigError
from ..models import Scenario
from .base import BaseRunner, make

GRAM_KEYS = ["alpha", "beta", "gamma", "delta"]
SWITCH_KEYS = ["switch_time", "alpha0", "beta0", "gamma0", "delta0", "times"]


def _matrix(entries: list[complex]) -> np.ndarray:
    return np.reshape(np.asarray(entries, dtype=complex), (2, 2)) if len(entries) == 4 else np.asarray(entries, dtype=complex)


class QubitRunner(BaseRunner):
    """
    Side-1 marginals of the two-qubit toy model.

    Particle 2's evolution is given as a matrix ``u2`` (four entries, row-major), as its
    Gram matrix ``alpha``…``delta``, or as a time switch. The oracle columns evaluate the
    same probabilities on the full two-particle state with ``u1`` on side 1, taking the
    positive square root of the Gram matrix when no ``u2`` is given.
    """

    name = "Qubit marginals"
    scenario = Scenario.QUBIT
    parameters = {
        "u1": Parameter(complexes, [1, 0, 0, 1]),
        "u2": Parameter(complexes, None),
        "alpha": Parameter(complex, None),
        "beta": Parameter(complex, None),
        "gamma": Parameter(complex, None),
        "delta": Parameter(complex, None),
        "switch_time": Parameter(float, None),
        "alpha0": Parameter(complex, 0),
        "beta0": Parameter(complex, 0),
        "gamma0": Parameter(complex, 0),
        "delta0": Parameter(complex, 0),
        "times": Parameter(floats, None),
    }

    def _form(self) -> str:
        given = set(self.config.parameters)
        forms = [form for form, keys in [("u2", ["u2"]), ("gram", GRAM_KEYS), ("switch", SWITCH_KEYS)] if given & set(keys)]

        if len(forms) != 1:
            raise ScenarioConfigError("ScenarioConfig.u2: give exactly one of u2, alpha…delta or switch_time, got {}".format(forms or "none"))

        if forms == ["switch"] and not {"switch_time", "times"} <= given:
            raise ScenarioConfigError("ScenarioConfig.switch_time: a time switch needs both switch_time and times")

        return forms[0]

    def prepare(self, values: dict) -> dict:
        form = self._form()
        u1 = make(EvolutionMap2, matrix=_matrix(values["u1"]), role=Role.U1)

        if form == "u2":
            u2 = make(EvolutionMap2, matrix=_matrix(values["u2"]))
            return {"u1": u1, "grams": [(None, gram(u2), u2)]}

        if form == "gram":
            g = make(GramMatrix, **{name: values[name] if values[name] is not None else complex(name in ["alpha", "delta"]) for name in GRAM_KEYS})
            return {"u1": u1, "grams": [(None, g, gram_root(g))]}

        switch = make(TimeSwitch, **{name: values[name] for name in SWITCH_KEYS if name != "times"})
        grams = []

        for t in values["times"]:
            g = switch.gram_at(t)
            grams.append((t, g, gram_root(g)))

        return {"u1": u1, "grams": grams}

    def execute(self, prepared: dict) -> dict:
        rows = []

        for t, g, u2 in prepared["grams"]:
            p_plus, p_minus = marginal_probs_closed(g)
            oracle_plus, oracle_minus = marginal_probs_oracle(prepared["u1"], u2)
            rows.append([t, p_plus, p_minus, signaling_deviation(g), oracle_plus, oracle_minus])

        frame = pd.DataFrame(rows, columns=["t", "p_plus", "p_minus", "deviation", "oracle_p_plus", "oracle_p_minus"])
        if all(t is None for t, _, _ in prepared["grams"]):
            frame = frame.drop(columns="t")

        return {"qubit.csv": frame}
