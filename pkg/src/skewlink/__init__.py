"""Binary regression with symmetric and skewed link functions.

Standard links (logit, probit, cloglog) fit by maximum likelihood;
skewed links (standard GEV, skewed Weibull, Frechet) fit by random-walk
Metropolis-Hastings. Model comparison via DIC/BIC/KS/MAE and posterior
predictive forecasting of aggregate counts and benefit amounts.
"""

from .links import (
    FAMILIES,
    SKEWED_FAMILIES,
    SYMMETRIC_FAMILIES,
    LinkSpec,
    Support,
    cloglog,
    frechet,
    gev,
    logit,
    probit,
    skewed_weibull,
)
from .model import (
    Coefficients,
    Dataset,
    PriorSpec,
    log_likelihood,
    log_posterior,
    log_prior,
    make_log_posterior,
    success_prob,
)
from .mcmc import (
    MHConfig,
    PosteriorSamples,
    posterior_mean,
    posterior_sample_variance,
    posterior_variance,
    run_mh,
    tune_steps,
)
from .glm import MLEFit, ReducedFit, bic, fit_glm_mle, reduce_model, wald_pvalues
from .diagnostics import (
    DicResult,
    FitReport,
    build_fit_report,
    deviance,
    dic,
    hpd_interval,
    ks_stat,
    mae,
    max_abs_error,
    posterior_mean_probs,
)
from .fit import fit_bayes
from .predict import (
    CurveData,
    PredictiveDraws,
    PredictiveSummary,
    cumulative_curves,
    expected_count,
    frequentist_classify,
    posterior_predictive,
    summarize_predictive,
)
from .simulate import SimConfig, experiment1, experiment2, gen_binary
from .data import (
    DataError,
    EncodedData,
    EncodingPlan,
    PolicyRecord,
    encode,
    load_csv,
    read_design_csv,
    write_design_csv,
)

__version__ = "0.1.0"
