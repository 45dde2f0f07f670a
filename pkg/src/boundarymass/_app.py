from collections import OrderedDict
from typing import List, Optional, Tuple

import numpy as np

from . import _log as log
from ._config import Config
from ._effects import SideEffects
from ._report import ReportEnvelope, all_passed
from ._suites import run_suite
from ._types import Box
from .clifford import build_rep, mass_values_from, quadratic_form_Ktilde
from .constraints import DecReport, check_dec, dec_sample, decay_audit
from .datasets import (
    DatasetDescriptor,
    build_dataset,
    dump_dataset,
    load_dataset)
from .geometry import InitialDataSet
from .mass import (
    FlatMassReport,
    default_exponent,
    einstein_energy_crosscheck,
    energy_momentum_flat,
    energy_momentum_pair,
    mass_inequality_report)
from .models import change_model


#: Exit codes.
PASSED, VIOLATED, USAGE, NONCONVERGENCE = 0, 1, 2, 3


def _worst_payload(worst) -> OrderedDict:
    return OrderedDict([
        ('margin', worst.margin),
        ('point', worst.point),
        ('passed', worst.passed),
    ])


def dec_payload(dec: DecReport) -> OrderedDict:
    return OrderedDict([
        ('passed', dec.passed),
        ('samples', len(dec.values)),
        ('interior', _worst_payload(dec.interior)),
        ('boundary_tangential', _worst_payload(dec.boundary_tangential)),
        ('boundary_normal', _worst_payload(dec.boundary_normal)),
        ('trapped_plus', _worst_payload(dec.trapped_plus)),
        ('trapped_minus', _worst_payload(dec.trapped_minus)),
    ])


def dec_table(dec: DecReport) -> List[OrderedDict]:
    rows = []
    for v in dec.values:
        rows.append(OrderedDict([
            ('point', ' '.join('{:.12g}'.format(x) for x in v.point)),
            ('rho', v.rho),
            ('J_norm', v.J_norm),
            ('interior_margin', v.rho - v.J_norm),
            ('H', v.H),
            ('pi_tangential_norm', None if v.pi_tangential is None
             else float(np.linalg.norm(v.pi_tangential))),
            ('pi_normal', v.pi_normal),
        ]))
    return rows


class Application(object):
    def __init__(self, config: Config, effects: SideEffects):
        self.config = config
        self.effects = effects

    def load_descriptor(self, path: str) -> DatasetDescriptor:
        """
        Read a dataset file from the working directory.
        """
        log.debug(f'Loading dataset {path}')
        return load_dataset(self.effects.cwd_fs().readtext(path))

    def build(self, descriptor: DatasetDescriptor) -> InitialDataSet:
        return build_dataset(descriptor, self.effects.cwd_fs())

    def generate(self, descriptor: DatasetDescriptor, output: str) -> str:
        """
        Validate a descriptor by building its data, and write the dataset
        file.
        """
        self.build(descriptor)
        return self.effects.write_text(output, dump_dataset(descriptor))

    def _sample_points(self, data: InitialDataSet, box: Optional[Box]):
        box = box if box is not None else self.config.audit_box
        return dec_sample(data.domain, box, self.config.audit_points)

    def _dec(self, data: InitialDataSet, box: Optional[Box]) -> DecReport:
        return check_dec(data, self._sample_points(data, box),
                         self.config.dec_tol, step_scale=self.config.step)

    def audit(self, descriptor: DatasetDescriptor,
              box: Optional[Box] = None
              ) -> Tuple[ReportEnvelope, List[OrderedDict], int]:
        """
        Sampled energy conditions and the decay audit of a dataset.
        """
        envelope = ReportEnvelope('audit', descriptor.as_dict())
        data = self.build(descriptor)
        dec = self._dec(data, box)
        polar = (change_model(data, 'hyperbolic-polar')
                 if data.domain.model == 'hyperbolic-ball' else data)
        decay = decay_audit(
            polar, self.config.decay_radii, self.config.decay_orders,
            step_scale=self.config.step)
        passed = dec.passed and decay.passed
        payload = OrderedDict([
            ('passed', passed),
            ('dec', dec_payload(dec)),
            ('decay', OrderedDict([
                ('passed', decay.passed),
                ('radii', decay.radii),
                ('weighted_sup', decay.weighted_sup),
                ('decay_slope', decay.decay_slope),
                ('decay_passed', decay.decay_passed),
                ('annulus_integrals', decay.annulus_integrals),
                ('integrals_passed', decay.integrals_passed),
            ])),
        ])
        log.info(f'Audit of {descriptor.example}: passed={passed}')
        return (envelope.finish(payload), dec_table(dec),
                PASSED if passed else VIOLATED)

    def mass(self, descriptor: DatasetDescriptor,
             box: Optional[Box] = None,
             crosscheck: bool = False
             ) -> Tuple[ReportEnvelope, List[OrderedDict], int]:
        """
        Energy-momentum invariants, their causal character and the positive
        mass statement against the sampled energy conditions.

        Raises ``ConvergenceError`` when the flux limits do not settle.
        """
        config = self.config
        envelope = ReportEnvelope('mass', descriptor.as_dict())
        data = self.build(descriptor)
        exponent = (default_exponent(data) if config.fit_exponent is None
                    else config.fit_exponent)
        kw = dict(orders=config.orders, window=config.fit_window,
                  exponent=exponent, tol=config.convergence_tol,
                  step_scale=config.step)
        payload = OrderedDict([
            ('radii', config.radii),
            ('orders', config.orders),
            ('exponent', exponent),
        ])
        if data.domain.is_flat:
            report = energy_momentum_flat(data, config.radii, **kw)
            payload.update([
                ('model', 'flat'),
                ('E', report.E),
                ('E_error', report.E_error),
                ('P', report.P),
                ('P_error', report.P_error),
                ('lorentz_norm', report.lorentz_norm),
                ('causal_class', report.causal_class),
                ('E_minus_abs_P', report.E - float(np.linalg.norm(report.P))),
                ('adm_normalized_E', report.adm_normalized),
            ])
            if crosscheck:
                check = einstein_energy_crosscheck(
                    data, config.radii, reference=report.E, **kw)
                payload['einstein_crosscheck'] = OrderedDict([
                    ('E', check.energy),
                    ('error', check.error),
                    ('relative_deviation', check.relative_deviation),
                ])
        else:
            report = energy_momentum_pair(data, config.radii, **kw)
            payload.update([
                ('model', 'hyperbolic'),
                ('energy', report.energy),
                ('energy_error', report.energy_error),
                ('momentum', report.momentum),
                ('momentum_error', report.momentum_error),
                ('energy_norm', report.energy_norm),
                ('momentum_norm', report.momentum_norm),
                ('energy_class', report.energy_class),
                ('momentum_class', report.momentum_class),
                ('adm_normalized_energy', report.adm_normalized),
                ('quadratic_forms', self._quadratic_forms(report)),
            ])
        dec = self._dec(data, box)
        inequality = mass_inequality_report(report, dec, config.dec_tol)
        payload['dec'] = dec_payload(dec)
        payload['inequality'] = OrderedDict([
            ('margin', inequality.margin),
            ('classes', inequality.classes),
            ('dec_passed', inequality.dec_passed),
            ('holds', inequality.inequality_holds),
            ('message', inequality.message),
        ])
        code = (VIOLATED if inequality.dec_passed and
                not inequality.inequality_holds else PASSED)
        kind = 'flat' if isinstance(report, FlatMassReport) else 'hyperbolic'
        log.info(f'Mass of {descriptor.example} ({kind}): exit {code}')
        return envelope.finish(payload), report.table, code

    def _quadratic_forms(self, report) -> OrderedDict:
        rep = build_rep(report.n)
        values = mass_values_from(report.energy, report.momentum)
        forms = OrderedDict()
        for kind in ('CHI+', 'CHI-'):
            form = quadratic_form_Ktilde(
                rep, values, kind, tol=self.config.algebra_tol)
            forms[kind] = OrderedDict([
                ('eigenvalues', form.eigenvalues),
                ('positive_semidefinite', form.passed),
            ])
        return forms

    def verify(self, suite: str, n: int, seed: int
               ) -> Tuple[ReportEnvelope, List[OrderedDict], int]:
        """
        Run an identity-verification suite.
        """
        envelope = ReportEnvelope('verify')
        rows = run_suite(suite, self.config, n, seed)
        passed = all_passed(rows)
        payload = OrderedDict([
            ('suite', suite),
            ('n', n),
            ('seed', seed),
            ('passed', passed),
            ('rows', rows),
        ])
        return (envelope.finish(payload), rows,
                PASSED if passed else VIOLATED)
