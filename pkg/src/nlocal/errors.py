"""Exception types raised across the package."""


class NLocalError(ValueError):
    """Base class for all input errors raised by nlocal."""


class PhysicalityError(NLocalError):
    """A matrix or a family parameter set does not describe a valid state."""


class TopologyError(NLocalError):
    """An operation was applied to a network of the wrong topology."""


class SettingsError(NLocalError):
    """Measurement settings are malformed (wrong count, non-unit vectors)."""


class DescriptorError(NLocalError):
    """A JSON state or network descriptor could not be parsed.

    ``field`` is a dotted path to the offending entry, e.g. ``sources[1].v``.
    """

    def __init__(self, message: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {message}" if field else message)
