"""formationkit: plan group-dance floor formations and assess performances.

The package is organized around five concerns:

* :mod:`formationkit.model` - the choreography data model and validation
* :mod:`formationkit.editing` - atomic editing operations and templates
* :mod:`formationkit.analysis` - transition paths, distances, collisions,
  hulls, and floor-utilization heatmaps
* :mod:`formationkit.assessment` - video tracks, homography projection,
  and deviation reports
* :mod:`formationkit.persistence` - versioned documents and report export

``formationkit.cli`` and ``formationkit.service`` expose the same
functionality as a command line tool and an HTTP service.
"""

from .model import (
    Choreography,
    Dance,
    Entity,
    FloorSpec,
    Formation,
    Placement,
    Pose,
    SCHEMA_VERSION,
    Shape,
    TimelinePosition,
    Transition,
    Violation,
    Waypoint,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "SCHEMA_VERSION",
    "Choreography",
    "Dance",
    "Entity",
    "FloorSpec",
    "Formation",
    "Placement",
    "Pose",
    "Shape",
    "TimelinePosition",
    "Transition",
    "Violation",
    "Waypoint",
    "validate",
    "__version__",
]
