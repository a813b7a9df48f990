"""Exception types raised by the receiver chain."""


class AltitudeEncodingError(ValueError):
    """Altitude outside the 25-ft code range or not a multiple of 25 ft."""


class UnsupportedEncodingError(ValueError):
    """AC field uses an encoding we do not decode (Gillham, metric)."""


class RankDeficiencyError(ValueError):
    """Least-squares system does not have full column rank."""


class GeometryError(ValueError):
    """Triangular ranging inputs give a non-positive or undefined range."""


class ConfigError(ValueError):
    """Invalid scenario or sweep configuration."""
