class ScenarioConfigError(Exception):
    """
    A scenario file that cannot be read as a scenario: bad syntax, no or several
    sections, an unknown scenario, unknown keys or values that do not parse.

    :ivar diagnostics: One ``ScenarioConfig.<key>: <message>`` line per problem.
    :type diagnostics: List[str]
    """

    def __init__(self, diagnostics: list[str] | str):
        self.diagnostics = [diagnostics] if isinstance(diagnostics, str) else list(diagnostics)

        super().__init__("; ".join(self.diagnostics))
