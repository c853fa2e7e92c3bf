"""Exception types shared by the receiver-design modules."""


class DesignError(ValueError):
    """Base class for domain and model violations."""


class GeometryError(DesignError):
    """Physically impossible geometry (lens pitch, fill factor, layout)."""


class ModelValidityError(DesignError):
    """Inputs outside the validity range of an approximation."""


class InfeasibleConstraintError(DesignError):
    """A requirement that no geometry can satisfy (e.g. FOV too wide)."""


class ConfigError(DesignError):
    """Malformed or inconsistent configuration file."""

    def __init__(self, message, section=None, key=None):
        self.section = section
        self.key = key
        where = ""
        if section is not None:
            where = f" in [{section}]"
            if key is not None:
                where = f" for key '{key}' in [{section}]"
        super().__init__(f"config error{where}: {message}")
