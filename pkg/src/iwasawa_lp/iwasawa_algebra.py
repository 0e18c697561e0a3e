"""Power series over Z_p, the semi-local algebra Lambda_cyc, Weierstrass preparation."""
from .iwasawa import (CharacteristicIdeal, IwasawaSeries, LambdaCycElement, WeierstrassData,
                      char_ideal_from_presentation, evaluation_point, mu_lambda, mu_lambda_scan,
                      omega_poly, poly_divmod, resultant_valuation, series_det, specialize,
                      weierstrass_prepare)

__all__ = ["CharacteristicIdeal", "IwasawaSeries", "LambdaCycElement", "WeierstrassData",
           "char_ideal_from_presentation", "evaluation_point", "mu_lambda", "mu_lambda_scan",
           "omega_poly", "poly_divmod", "resultant_valuation", "series_det", "specialize",
           "weierstrass_prepare"]
