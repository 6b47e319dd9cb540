"""odbr: record Android input sessions, rebuild gestures, emit replayable bug reports.

The package is organized as a pipeline: events (raw evdev/getevent decoding and
touch tracking) feeds gestures (interaction segmentation and classification),
hierarchy (UI dump hit-testing) names what was touched, and report/bundle wrap
the result in a schema-versioned JSON document with HTML and replay-script
renderings.  capture drives live or fixture-backed recording sessions through a
device bridge; store and service persist and serve finished reports.
"""

__version__ = "0.1.0"
