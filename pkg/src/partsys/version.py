"""Single source of the toolkit version, recorded in saved artifacts."""

TOOLKIT_VERSION = "0.1.0"
