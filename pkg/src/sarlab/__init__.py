"""Near-field SAR laboratory.

Simulates raw radar echoes from configurable synthetic apertures and target
scenes, reconstructs 2-D/3-D images with backprojection and FFT-based range
migration, measures point spread functions against resolution theory, and
mass-generates labeled datasets.  Driven by a CLI (``sarlab``), a REST job
service (``sarlab serve``), and a browser wizard.
"""

from sarlab.constants import C

__version__ = "0.1.0"

__all__ = ["C", "__version__"]
