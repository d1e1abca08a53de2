from .common import (TwoPhotonError, ConfigError, ModelError, NumericalError,
                     InsufficientStatisticsError, HBAR_UEV_PS)
from .fock import FockSpace, LindbladModel, DensityMatrix, prepare_state
from .analytic import DecayDephaseParams, FilterParams, boson_form_factor
from .sensors import SpectrumGrid, CorrelationTrace
from .condensate import CondensateParams
from .hasher import hash_document
