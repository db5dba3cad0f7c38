"""Exception hierarchy shared by the library and the CLI.

Exit-code mapping used by the CLI: CapacityError -> 3, FormatError and
I/O errors -> 4. A failed extraction is *not* an exception: decode returns
None so that every failure cause is indistinguishable by default.
"""


class QgkError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(QgkError):
    """Unsupported or malformed input (image mode, raster shape, hex string)."""


class CapacityError(QgkError):
    """Carrier image cannot hold the requested payload."""


class ParameterError(QgkError):
    """Invalid numeric parameter (circuit bounds, distribution supports)."""


class StageFailure(QgkError):
    """Decode failure annotated with the failing stage.

    Raised only when decode runs with debug enabled; the default path maps
    every failure to a bare None so no stage information leaks.
    """

    def __init__(self, stage: str):
        super().__init__(f"decode failed at stage: {stage}")
        self.stage = stage
