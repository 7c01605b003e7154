from django.core.exceptions import ValidationError


class UnitarityError(ValidationError):
    """An evolution operator required to be unitary is not."""
