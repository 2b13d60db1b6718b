"""Exception types raised across haltlab."""


class HaltlabError(Exception):
    """Base class for all haltlab errors."""


class IterationLimitExceeded(HaltlabError):
    pass


class ProfileInvalid(HaltlabError, ValueError):
    pass


class AspectTooSmall(HaltlabError, ValueError):
    pass


class HorizonExceeded(HaltlabError):
    pass


class StepInvalid(HaltlabError, ValueError):
    pass


class NotPositiveDefinite(HaltlabError, ValueError):
    pass


class DegenerateSample(HaltlabError, ValueError):
    pass


class DegenerateGap(HaltlabError, ValueError):
    pass


class ScalingViolation(HaltlabError, ValueError):
    pass


class ConfigInvalid(HaltlabError, ValueError):
    """Configuration error; ``errors`` maps field name to message."""

    def __init__(self, errors):
        self.errors = dict(errors)
        msg = "; ".join(f"{k}: {v}" for k, v in self.errors.items())
        super().__init__(msg)


class MismatchedConfig(HaltlabError, ValueError):
    pass


class ArtifactIOError(HaltlabError, OSError):
    pass
