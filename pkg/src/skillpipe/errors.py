"""Exception types shared across the package.

The CLI maps these onto exit codes: ConfigError (and subclasses) -> 2,
BackendLoadError -> 3. Everything else propagating out of a run is a bug.
"""


class SkillpipeError(Exception):
    """Base class for package-specific failures."""


class ConfigError(SkillpipeError):
    """Invalid configuration, flags, or other user-supplied input."""


class ManifestError(ConfigError):
    """Malformed dataset manifest (bad header, label, or duplicate id)."""


class BackendLoadError(SkillpipeError):
    """A model backend could not be loaded or failed validation."""


class UnsupportedOperatorError(BackendLoadError):
    """A serialized graph uses an operator the embedded runtime lacks."""


class StageFailure(SkillpipeError):
    """A pipeline stage failed while processing one frame."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage '{stage}' failed: {cause}")
        self.stage = stage
        self.cause = cause
