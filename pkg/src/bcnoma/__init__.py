"""Two-user downlink NOMA with user cooperation: minimum-power solvers,
outage and rate estimators, and DMT checks for the NC, CR, IR and BC schemes."""

from .model import (ALL_SCHEMES, ChannelBatch, ChannelRealization, OrderedChannel, Scheme,
                    SinrSet, SystemParams, evaluate_sinrs, order_users, sample_channel,
                    sample_channels, threshold_snr)
from .power import (GridSpec, MinPowerResult, PowerAllocation, min_power, min_power_bc,
                    min_power_cr, min_power_ir, min_power_nc, oracle_min_power)
from .outage import (Estimate, simulate_outage, sop, sop_analytic, sop_analytic_bc,
                     sop_analytic_cr_ir, sop_analytic_nc, sop_monte_carlo)
from .rates import EsrResult, esr, p_ct_ir_analytic, p_ct_ir_monte_carlo
from .dmt import MultiplexPoint, SlopeFit, dmt_empirical, dmt_theoretical
from .kernels import BACKEND

__version__ = "0.1.0"
