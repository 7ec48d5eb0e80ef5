"""Exception hierarchy shared by all intervaltok modules."""


class IntervaltokError(Exception):
    """Base class for every error raised by this package."""


class ParseError(IntervaltokError):
    """Malformed Standard MIDI File or unsupported score content."""


class RangeError(IntervaltokError):
    """A pitch left the MIDI range 0..127."""


class EmptyInputError(IntervaltokError):
    """An operation that needs at least one note received none."""


class MonophonyError(IntervaltokError):
    """A reference stream contains simultaneous events."""


class GrammarError(IntervaltokError):
    """A token sequence violates the token grammar."""


class CodecError(IntervaltokError):
    """A token or id is not part of the vocabulary."""


class ConfigMismatchError(IntervaltokError):
    """Token data and vocabulary were built from different configs."""


class InternalError(IntervaltokError):
    """An internal invariant was breached; indicates a bug."""


class DanglingNoteWarning(UserWarning):
    """A note-on had no matching note-off; the note was closed at track end."""
