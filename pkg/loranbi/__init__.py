from loranbi.css import *
from loranbi.waveforms import *
from loranbi.channel import *
from loranbi.stationary_phase import *
from loranbi.fitting import *
from loranbi.errors import *

from ._version import __version__
