"""Command-line surface: single prices, convergence tables, densities, sweeps.

Four subcommands:

* ``price``       one option under one model and method
* ``table``       SINC and COS convergence errors on a predefined strike grid
* ``pdf``         density (and optionally CDF) of the return on a uniform grid
* ``beta-sweep``  tune the frequency-step multiplier of a damped-call engine

Exit codes: 0 on success, 2 on usage errors, 3 on numeric failures (the
error is also written to stderr as one JSON object).  All outputs are
deterministic for a fixed configuration; the only environment influence is
SINCPRICER_THREADS, which sizes the worker pool used to fill table cells.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import analytics, competitors, sinc_core
from .fft_engine import FftPlanSpec, interpolate_strikes, put_smile_fft
from .models import (
    CgmyParams,
    GbmParams,
    HestonParams,
    MarketSpec,
    PricingError,
    black_scholes_put,
    cf_cgmy,
    cf_gbm,
    cf_heston,
    load_model_params,
)
from .rough_heston import ForwardVarianceCurve, RoughHestonCf, RoughHestonParams
from .sinc_core import (
    PayoffKind,
    PricingRequest,
    TruncationRange,
    digital_price,
    find_truncation,
    pv_call,
    pv_put,
)

_EXIT_NUMERIC = 3
_METHODS = ("sinc", "sinc-fft", "sinc-frfft", "cos", "lewis", "carrmadan")
_STRIKES = tuple((60 + 10 * i) / 100.0 for i in range(9))


def format_value(v: float) -> str:
    """Paper-table float formatting: 10 decimals chopped, scientific when tiny.

    Chopping (truncation toward zero) rather than rounding is deliberate: the
    reference tables chop their benchmark values, so 0.02664951828... must
    print as 0.0266495182, not 0.0266495183.
    """
    if not math.isfinite(v):
        return repr(v)
    if v != 0.0 and abs(v) < 1e-4:
        return f"{v:.6e}"
    s = f"{v:.14f}"
    return s[: s.index(".") + 11]


def _threads() -> int:
    raw = os.environ.get("SINCPRICER_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _is_pow2(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


# ---------------------------------------------------------------------------
# argument plumbing


def _add_market_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--params", help="JSON or TOML file with model/market sections")
    p.add_argument("--s0", type=float, default=None, help="spot (default 1)")
    p.add_argument("--r", type=float, default=None, help="risk-free rate (default 0)")
    p.add_argument("--q", type=float, default=None, help="dividend yield (default 0)")
    p.add_argument("--T", type=float, default=None, help="maturity in years")


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--model", required=True, choices=("gbm", "heston", "cgmy", "rheston"))
    p.add_argument("--sigma", type=float, default=None, help="gbm volatility")
    p.add_argument("--lam", type=float, default=None, help="heston mean-reversion speed")
    p.add_argument("--eta", type=float, default=None, help="heston vol of variance")
    p.add_argument("--vbar", type=float, default=None, help="heston long-run variance")
    p.add_argument("--v0", type=float, default=None, help="heston initial variance")
    p.add_argument("--rho", type=float, default=None, help="correlation (heston/rheston)")
    p.add_argument("--C", type=float, default=None, help="cgmy activity scale")
    p.add_argument("--G", type=float, default=None, help="cgmy left tempering")
    p.add_argument("--M", type=float, default=None, help="cgmy right tempering")
    p.add_argument("--Y", type=float, default=None, help="cgmy small-jump exponent")
    p.add_argument("--H", type=float, default=None, help="rheston Hurst exponent")
    p.add_argument("--nu", type=float, default=None, help="rheston vol of volatility")
    p.add_argument("--xi0", type=float, default=None, help="rheston flat forward variance")
    p.add_argument(
        "--variance-curve",
        default=None,
        help="CSV of time,value rows defining the rheston forward-variance curve",
    )
    p.add_argument("--n-steps", type=int, default=200, help="rheston Adams time steps")


def _load_sections(args, parser: argparse.ArgumentParser) -> dict:
    if not args.params:
        return {}
    try:
        return load_model_params(args.params)
    except (OSError, ValueError, TypeError) as exc:
        parser.error(f"cannot read --params {args.params}: {exc}")


def _market_from_args(args, sections: dict, parser, require_t: bool = True) -> MarketSpec:
    base = sections.get("market")
    s0 = args.s0 if args.s0 is not None else (base.s0 if base else 1.0)
    r = args.r if args.r is not None else (base.r if base else 0.0)
    q = args.q if args.q is not None else (base.q if base else 0.0)
    t = args.T if args.T is not None else (base.T if base else None)
    if t is None:
        if require_t:
            parser.error("--T is required (or provide a market section in --params)")
        t = 1.0  # placeholder for commands that price per-maturity
    try:
        return MarketSpec(s0=s0, r=r, q=q, T=t)
    except ValueError as exc:
        parser.error(str(exc))


def _merge(flag_value, section, key):
    if flag_value is not None:
        return flag_value
    if section is not None:
        return getattr(section, key, None) if not isinstance(section, dict) else section.get(key)
    return None


def _require(parser, model: str, **fields):
    missing = [name for name, value in fields.items() if value is None]
    if missing:
        parser.error(f"model {model} needs --" + ", --".join(missing))
    return fields


def _build_model(args, sections: dict, parser):
    """Model parameter object (plus curve for rheston) from flags and file."""
    model = args.model
    section = sections.get(model)
    try:
        if model == "gbm":
            f = _require(parser, model, sigma=_merge(args.sigma, section, "sigma"))
            return GbmParams(sigma=f["sigma"]), None
        if model == "heston":
            f = _require(
                parser,
                model,
                lam=_merge(args.lam, section, "lam"),
                eta=_merge(args.eta, section, "eta_vol"),
                vbar=_merge(args.vbar, section, "v_bar"),
                v0=_merge(args.v0, section, "v0"),
                rho=_merge(args.rho, section, "rho"),
            )
            return (
                HestonParams(
                    lam=f["lam"], eta_vol=f["eta"], v_bar=f["vbar"], v0=f["v0"], rho=f["rho"]
                ),
                None,
            )
        if model == "cgmy":
            f = _require(
                parser,
                model,
                C=_merge(args.C, section, "C"),
                G=_merge(args.G, section, "G"),
                M=_merge(args.M, section, "M"),
                Y=_merge(args.Y, section, "Y"),
            )
            return CgmyParams(C=f["C"], G=f["G"], M=f["M"], Y=f["Y"]), None
        # rheston
        f = _require(
            parser,
            model,
            H=_merge(args.H, section, "H"),
            nu=_merge(args.nu, section, "nu"),
            rho=_merge(args.rho, section, "rho"),
        )
        params = RoughHestonParams(H=f["H"], nu=f["nu"], rho=f["rho"])
        if args.variance_curve:
            curve = ForwardVarianceCurve.from_csv(args.variance_curve)
        else:
            xi0 = _merge(args.xi0, section, "xi0")
            if xi0 is None:
                parser.error("model rheston needs --xi0 or --variance-curve")
            curve = ForwardVarianceCurve.flat(xi0)
        return params, curve
    except ValueError as exc:
        parser.error(str(exc))


def _bind_cf(model: str, params, curve, market: MarketSpec, n_steps: int):
    """Callable kappa -> CF value for the chosen model at this market."""
    if model == "gbm":
        return lambda kap: cf_gbm(params, market, kap)
    if model == "heston":
        return lambda kap: cf_heston(params, market, kap)
    if model == "cgmy":
        return lambda kap: cf_cgmy(params, market, kap)
    return RoughHestonCf(params, curve, market, n_steps=n_steps)


def _resolve_range(args, cf) -> TruncationRange:
    if getattr(args, "xc", None):
        return TruncationRange.symmetric(args.xc)
    return find_truncation(cf)


# ---------------------------------------------------------------------------
# price


def _scaled_digitals(market: MarketSpec, strike, con, aon):
    df_r = math.exp(-market.r * market.T)
    df_q = math.exp(-market.q * market.T)
    return df_r * np.asarray(strike) * np.asarray(con), df_q * market.s0 * np.asarray(aon)


def cmd_price(args, parser) -> int:
    sections = _load_sections(args, parser)
    market = _market_from_args(args, sections, parser)
    params, curve = _build_model(args, sections, parser)
    method, kind, payoff = args.method, args.kind, args.payoff

    if kind != "pv" and method in ("lewis", "carrmadan"):
        parser.error(f"method {method} prices calls only; digital kinds need sinc/cos")
    if kind != "pv" and payoff == "call":
        parser.error("digital kinds are put-style; drop --payoff call")
    if args.nf < 1:
        parser.error("--nf must be positive")
    if method == "sinc" and kind == "pv" and args.nf % 2:
        parser.error("--nf must be even for present values (two digital series)")
    if method in ("sinc-fft", "sinc-frfft"):
        min_nf = 4 if kind == "pv" else 2
        if not (_is_pow2(args.nf) and args.nf >= min_nf):
            parser.error(f"method {method} needs --nf a power of two >= {min_nf}")
    if method in ("lewis", "carrmadan") and not (_is_pow2(args.nf) and args.nf >= 8):
        parser.error(f"method {method} needs --nf a power of two >= 8")
    epsilon = args.epsilon
    if epsilon is None:
        epsilon = 0.15 if method == "sinc-frfft" else 1.0
    if not 0.0 < epsilon <= 1.0:
        parser.error("--epsilon must lie in (0, 1]")
    if method == "sinc-fft" and epsilon != 1.0:
        parser.error("sinc-fft runs at epsilon = 1; use sinc-frfft for epsilon < 1")

    cf = _bind_cf(args.model, params, curve, market, args.n_steps)
    rng = _resolve_range(args, cf)
    strike = args.K
    df_r = math.exp(-market.r * market.T)
    df_q = math.exp(-market.q * market.T)

    if method == "sinc":
        kind_map = {
            ("pv", "put"): PayoffKind.PV_PUT,
            ("pv", "call"): PayoffKind.PV_CALL,
            ("con", "put"): PayoffKind.CON_PUT,
            ("aon", "put"): PayoffKind.AON_PUT,
        }
        req = PricingRequest(
            market=market,
            cf=cf,
            strike=strike,
            kind=kind_map[(kind, payoff)],
            n_f=args.nf,
            range=rng,
        )
        if kind == "pv":
            price = pv_put(req) if payoff == "put" else pv_call(req)
        else:
            price = digital_price(req).scaled_price
    elif method == "cos":
        cfg = competitors.CosConfig(n_f=args.nf, range=rng)
        if kind == "pv":
            price = (
                competitors.cos_put(cf, market, strike, cfg)
                if payoff == "put"
                else competitors.cos_call(cf, market, strike, cfg)
            )
        elif kind == "con":
            price = df_r * strike * competitors.cos_con_digital(cf, market.log_moneyness(strike), cfg)
        else:
            price = df_q * market.s0 * competitors.cos_aon_digital(
                cf, market.log_moneyness(strike), cfg
            )
    elif method in ("sinc-fft", "sinc-frfft"):
        # --nf budgets the requested quantity: a present value splits it
        # across both digital legs, a single digital keeps all of it
        n_plan = 2 * args.nf if kind == "pv" else 4 * args.nf
        plan = FftPlanSpec(n=n_plan, x_c=rng.x_c, epsilon=epsilon)
        smile = interpolate_strikes(put_smile_fft(cf, market, plan), [strike])
        if kind == "pv":
            if payoff == "put":
                price = float(smile.prices[0])
            else:
                price = float(
                    df_q * market.s0 * (1.0 - smile.aon[0]) - df_r * strike * (1.0 - smile.con[0])
                )
        elif kind == "con":
            price = float(df_r * strike * smile.con[0])
        else:
            price = float(df_q * market.s0 * smile.aon[0])
    else:
        if method == "lewis":
            cfg_l = competitors.LewisConfig(n=args.nf, beta=args.beta, x_c=rng.x_c)
            raw = competitors.lewis_call_fft(cf, market, cfg_l, epsilon=epsilon)
        else:
            cfg_c = competitors.CarrMadanConfig(
                n=args.nf, beta=args.beta, x_c=rng.x_c, alpha_cm=args.alpha_cm
            )
            raw = competitors.carr_madan_call_fft(cf, market, cfg_c, epsilon=epsilon)
        call = float(interpolate_strikes(raw, [strike]).prices[0])
        price = call if payoff == "call" else call - df_q * market.s0 + df_r * strike

    out = {
        "price": price,
        "method": method,
        "kind": kind,
        "payoff": payoff,
        "nf": args.nf,
        "xc": rng.x_c,
    }
    if args.implied_vol:
        if kind != "pv":
            parser.error("--implied-vol applies to --kind pv only")
        out["implied_vol"] = analytics.implied_vol(price, market, strike, payoff=payoff)

    if args.json:
        printable = {
            k: (format_value(v) if isinstance(v, float) else v) for k, v in out.items()
        }
        print(json.dumps(printable))
    else:
        print(f"price {format_value(price)}")
        if "implied_vol" in out:
            print(f"implied_vol {format_value(out['implied_vol'])}")
        print(f"method {method}")
        print(f"kind {kind}")
        print(f"payoff {payoff}")
        print(f"nf {args.nf}")
        print(f"xc {format_value(rng.x_c)}")
    return 0


# ---------------------------------------------------------------------------
# table


@dataclass(frozen=True)
class _TableDef:
    table_id: str
    model: str
    market: MarketSpec
    params: object
    curve: ForwardVarianceCurve | None
    n_f_grid: tuple[int, ...]
    digital: str  # second scored payoff next to the PV put


_HESTON_PARAMS = HestonParams(lam=1.5768, eta_vol=0.5751, v_bar=0.0398, v0=0.0175, rho=-0.5711)
_RHESTON_PARAMS = RoughHestonParams(H=0.05, nu=0.4, rho=-0.65)
_RHESTON_CURVE = ForwardVarianceCurve.flat(0.0256)


def _table_defs() -> dict[str, _TableDef]:
    mk = MarketSpec
    defs = [
        _TableDef(
            "gbm-t01", "gbm", mk(s0=1.0, r=0.1, q=0.0, T=0.1), GbmParams(sigma=0.25), None,
            (20, 40, 60, 80, 100, 120), "con",
        ),
        _TableDef(
            "heston-t01", "heston", mk(s0=1.0, r=0.0, q=0.0, T=0.1), _HESTON_PARAMS, None,
            (64, 128, 192, 256, 384, 512), "aon",
        ),
        _TableDef(
            "heston-t1", "heston", mk(s0=1.0, r=0.0, q=0.0, T=1.0), _HESTON_PARAMS, None,
            (128, 192, 256, 384, 512, 768), "aon",
        ),
        _TableDef(
            "cgmy15-t1", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=1.0),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.5), None,
            (16, 32, 48, 64, 96, 128), "con",
        ),
        _TableDef(
            "cgmy15-t001", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=0.01),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.5), None,
            (16, 32, 64, 128, 256, 512), "con",
        ),
        _TableDef(
            "cgmy198-t1", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=1.0),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.98), None,
            (16, 32, 48, 64, 96, 128), "con",
        ),
        _TableDef(
            "cgmy198-t001", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=0.01),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=1.98), None,
            (16, 32, 48, 64, 96, 128), "con",
        ),
        _TableDef(
            "cgmy05-t1", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=1.0),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=0.5), None,
            (16, 32, 64, 128, 256, 512), "con",
        ),
        _TableDef(
            "cgmy05-t001", "cgmy", mk(s0=1.0, r=0.1, q=0.0, T=0.01),
            CgmyParams(C=1.0, G=5.0, M=5.0, Y=0.5), None,
            (256, 512, 1024, 2048, 4096, 8192), "con",
        ),
        _TableDef(
            "rheston-t1", "rheston", mk(s0=1.0, r=0.0, q=0.0, T=1.0),
            _RHESTON_PARAMS, _RHESTON_CURVE,
            (256, 512, 768, 1024, 1536, 2048), "aon",
        ),
        _TableDef(
            "rheston-t001", "rheston", mk(s0=1.0, r=0.0, q=0.0, T=0.01),
            _RHESTON_PARAMS, _RHESTON_CURVE,
            (256, 512, 768, 1024, 1536, 2048), "aon",
        ),
    ]
    return {d.table_id: d for d in defs}


def _sinc_table_prices(cf, market, rng, strikes, n_f, digital="con"):
    """PV puts and the scored digital for every strike at budget n_f.

    n_f counts CF evaluations: the put splits it over its two legs, while
    the digital column spends the whole budget on its one series.
    """
    k = np.array([market.log_moneyness(s) for s in strikes])
    half = max(1, n_f // 2)
    con_h = sinc_core.con_digital(cf, k, rng, half)
    aon_h = sinc_core.aon_digital(cf, k, rng, half)
    con_hs, aon_hs = _scaled_digitals(market, np.asarray(strikes), con_h, aon_h)
    if digital == "con":
        dig = sinc_core.con_digital(cf, k, rng, n_f)
        dig_s, _ = _scaled_digitals(market, np.asarray(strikes), dig, dig)
    else:
        dig = sinc_core.aon_digital(cf, k, rng, n_f)
        _, dig_s = _scaled_digitals(market, np.asarray(strikes), dig, dig)
    return con_hs - aon_hs, dig_s


def _cos_table_prices(cf, market, rng, strikes, n_f, digital="con"):
    """COS equivalents; one coefficient set serves the put and the digital."""
    cfg = competitors.CosConfig(n_f=n_f, range=rng)
    coeff, u = competitors._cos_coefficients(cf, cfg)
    a, b = rng.x_l, rng.x_h
    con = np.empty(len(strikes))
    aon = np.empty(len(strikes))
    for i, s in enumerate(strikes):
        k = min(max(float(market.log_moneyness(s)), a), b)
        con[i] = coeff @ competitors._psi(u, a, a, k)
        aon[i] = coeff @ competitors._chi(u, a, a, k)
    con_s, aon_s = _scaled_digitals(market, np.asarray(strikes), con, aon)
    return con_s - aon_s, con_s if digital == "con" else aon_s


def _gbm_closed_benchmarks(table: _TableDef):
    market, sigma = table.market, table.params.sigma
    df_r = math.exp(-market.r * market.T)
    out = {}
    for s in _STRIKES:
        vol = sigma * math.sqrt(market.T)
        d2 = (math.log(market.s0 / s) + (market.r - market.q) * market.T) / vol - 0.5 * vol
        con_scaled = df_r * s * 0.5 * math.erfc(d2 / math.sqrt(2.0))
        out[("pv", s)] = analytics.closed_form_benchmark(black_scholes_put(market, sigma, s))
        out[("con", s)] = analytics.closed_form_benchmark(con_scaled)
    return out


def _dual_benchmarks(table: _TableDef, cf, rng, n_f_bench: int):
    sinc_pv, sinc_dig = _sinc_table_prices(
        cf, table.market, rng, _STRIKES, n_f_bench, table.digital
    )
    cos_pv, cos_dig = _cos_table_prices(
        cf, table.market, rng, _STRIKES, n_f_bench, table.digital
    )
    out = {}
    for i, s in enumerate(_STRIKES):
        out[("pv", s)] = analytics.make_benchmark(float(sinc_pv[i]), float(cos_pv[i]))
        out[(table.digital, s)] = analytics.make_benchmark(float(sinc_dig[i]), float(cos_dig[i]))
    return out


def cmd_table(args, parser) -> int:
    table = _table_defs()[args.id]
    market = table.market
    cf = _bind_cf(table.model, table.params, table.curve, market, args.n_steps)
    rng = find_truncation(cf)

    if table.model == "gbm":
        benchmarks = _gbm_closed_benchmarks(table)
        n_f_bench = 0  # closed form; no Fourier benchmark resolution involved
    else:
        n_f_bench = args.benchmark_nf or (2**16 if table.model == "rheston" else 2**20)
        benchmarks = _dual_benchmarks(table, cf, rng, n_f_bench)
    for (kind, s), bench in sorted(benchmarks.items()):
        if bench.low_agreement:
            print(
                f"warning: benchmark {kind} K={s:.2f} agrees to only "
                f"{bench.agreement} decimals",
                file=sys.stderr,
            )

    cache: dict[tuple[str, int], tuple] = {}

    def filled(method: str, n_f: int):
        key = (method, n_f)
        if key not in cache:
            fn = _sinc_table_prices if method == "sinc" else _cos_table_prices
            cache[key] = fn(cf, market, rng, _STRIKES, n_f, table.digital)
        return cache[key]

    threads = _threads()
    if threads > 1 and table.model != "rheston":
        # prefill concurrently; the memo below only reads completed entries
        jobs = [(m, n) for m in ("sinc", "cos") for n in table.n_f_grid]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(lambda job: filled(*job), jobs))

    records = []
    kind_rows = (("pv", 0), (table.digital, 1))
    for method in ("sinc", "cos"):
        for kind, row in kind_rows:
            for i, s in enumerate(_STRIKES):
                records.extend(
                    analytics.convergence_study(
                        lambda n_f, m=method, rr=row, ii=i: float(filled(m, n_f)[rr][ii]),
                        benchmarks[(kind, s)],
                        table.n_f_grid,
                        method=method,
                        kind=kind,
                        strike=s,
                    )
                )
    records.sort(key=lambda r: (r.method, r.kind, r.strike, r.n_f))

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        if args.format == "json":
            doc = {
                "table": table.table_id,
                "x_c": rng.x_c,
                "benchmark_nf": n_f_bench,
                "benchmarks": [
                    {
                        "kind": kind,
                        "K": s,
                        "value": bench.value,
                        "digits": bench.digits,
                        "source": bench.source,
                    }
                    for (kind, s), bench in sorted(benchmarks.items())
                ],
                "records": [
                    {
                        "method": r.method,
                        "kind": r.kind,
                        "K": r.strike,
                        "NF": r.n_f,
                        "value": r.value,
                        "rel_err": r.rel_err,
                        "star": r.star,
                    }
                    for r in records
                ],
            }
            json.dump(doc, out, indent=1)
            out.write("\n")
        else:
            out.write(f"# table {table.table_id} x_c {rng.x_c:.10g} benchmark_nf {n_f_bench}\n")
            for (kind, s), bench in sorted(benchmarks.items()):
                out.write(
                    f"# benchmark,{kind},{s:.2f},{format_value(bench.value)},{bench.digits}\n"
                )
            writer = csv.writer(out)
            writer.writerow(["method", "kind", "K", "NF", "rel_err", "star"])
            for r in records:
                writer.writerow(
                    [r.method, r.kind, f"{r.strike:.2f}", r.n_f, f"{r.rel_err:.6e}", int(r.star)]
                )
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# pdf


def cmd_pdf(args, parser) -> int:
    sections = _load_sections(args, parser)
    market = _market_from_args(args, sections, parser)
    params, curve = _build_model(args, sections, parser)
    if args.nf < 2 or args.nf % 2:
        parser.error("--nf must be an even positive count for the density series")
    if args.points < 2:
        parser.error("--points must be at least 2")

    cf = _bind_cf(args.model, params, curve, market, args.n_steps)
    rng = _resolve_range(args, cf)
    grid = np.linspace(rng.x_l, rng.x_h, args.points)
    dens = sinc_core.pdf(cf, grid, rng, args.nf)
    cdf_vals = sinc_core.cdf(cf, grid, rng, args.nf // 2) if args.with_cdf else None

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        out.write(f"# model {args.model} x_c {rng.x_c:.10g} nf {args.nf}\n")
        header = "x,pdf,cdf" if args.with_cdf else "x,pdf"
        out.write(header + "\n")
        for i, x in enumerate(grid):
            row = f"{x:.10g},{dens[i]:.10g}"
            if cdf_vals is not None:
                row += f",{cdf_vals[i]:.10g}"
            out.write(row + "\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# beta sweep


def _parse_betas(spec: str, parser) -> np.ndarray:
    try:
        if ":" in spec:
            lo, hi, count = spec.split(":")
            return np.linspace(float(lo), float(hi), int(count))
        return np.array([float(tok) for tok in spec.split(",") if tok])
    except ValueError:
        parser.error(f"cannot parse --betas {spec!r}; use start:stop:count or a comma list")


def _load_surface(path: str, parser) -> list[tuple[float, np.ndarray]]:
    """Rows of K,T grouped into (maturity, strikes) slices."""
    by_t: dict[float, list[float]] = {}
    try:
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].strip().startswith("#"):
                    continue
                try:
                    strike, mat = float(row[0]), float(row[1])
                except (IndexError, ValueError):
                    continue  # header or malformed row
                by_t.setdefault(mat, []).append(strike)
    except OSError as exc:
        parser.error(f"cannot read --surface {path}: {exc}")
    if not by_t:
        parser.error(f"--surface {path} holds no K,T rows")
    return [(t, np.array(sorted(ks))) for t, ks in sorted(by_t.items())]


def cmd_beta_sweep(args, parser) -> int:
    sections = _load_sections(args, parser)
    template = _market_from_args(args, sections, parser, require_t=False)
    params, curve = _build_model(args, sections, parser)
    if not (_is_pow2(args.nf) and args.nf >= 8):
        parser.error("--nf must be a power of two >= 8")
    if not 0.0 < args.epsilon <= 1.0:
        parser.error("--epsilon must lie in (0, 1]")
    betas = _parse_betas(args.betas, parser)

    if args.surface:
        slices = _load_surface(args.surface, parser)
    else:
        smiles = analytics.synthetic_surface(s0=template.s0, r=template.r, q=template.q)
        slices = [(sm.maturity, sm.strikes) for sm in smiles]

    err_sum = np.zeros(betas.size)
    n_points = 0
    for maturity, strikes in slices:
        market = replace(template, T=maturity)
        cf = _bind_cf(args.model, params, curve, market, args.n_steps)
        rng = find_truncation(cf)
        ref_pv, _ = _sinc_table_prices(cf, market, rng, strikes, args.benchmark_nf)
        ref_ivs = analytics.smile_implied_vols(ref_pv, market, strikes, payoff="put")
        if np.any(~np.isfinite(ref_ivs)):
            print(
                f"warning: benchmark vols not invertible at T={maturity:.6g}; "
                "slice skipped",
                file=sys.stderr,
            )
            continue
        sweep = analytics.beta_sweep(
            cf,
            market,
            args.engine,
            args.nf,
            betas,
            rng.x_c,
            strikes,
            ref_ivs,
            epsilon=args.epsilon,
            alpha_cm=args.alpha_cm,
        )
        err_sum += np.array([err for _, err in sweep]) * strikes.size
        n_points += strikes.size
    if n_points == 0:
        parser.error("no usable surface slices")

    out = sys.stdout if args.out in (None, "-") else open(args.out, "w", newline="")
    try:
        out.write("# beta grid: " + ",".join(f"{b:.10g}" for b in betas) + "\n")
        out.write(f"# engine {args.engine} nf {args.nf} epsilon {args.epsilon:.10g}\n")
        out.write("beta,mean_abs_iv_err\n")
        for i, b in enumerate(betas):
            out.write(f"{b:.10g},{err_sum[i] / n_points:.6e}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    return 0


# ---------------------------------------------------------------------------
# parser assembly


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sincpricer",
        description="Fourier option pricing via sampled digital series and competitors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_price = sub.add_parser("price", help="price one option")
    _add_model_flags(p_price)
    _add_market_flags(p_price)
    p_price.add_argument("--K", type=float, required=True, help="strike")
    p_price.add_argument("--method", required=True, choices=_METHODS)
    p_price.add_argument("--nf", type=int, required=True, help="Fourier resolution")
    p_price.add_argument("--kind", choices=("pv", "con", "aon"), default="pv")
    p_price.add_argument("--payoff", choices=("put", "call"), default="put")
    p_price.add_argument("--xc", type=float, default=None, help="override truncation half-width")
    p_price.add_argument("--epsilon", type=float, default=None, help="fractional FFT step scale")
    p_price.add_argument("--beta", type=float, default=1.0, help="lewis/carrmadan step divisor")
    p_price.add_argument("--alpha-cm", type=float, default=0.4, help="carrmadan damping")
    p_price.add_argument("--implied-vol", action="store_true", help="also invert the vol")
    p_price.add_argument("--json", action="store_true", help="emit one JSON object")
    p_price.set_defaults(func=cmd_price)

    p_table = sub.add_parser("table", help="convergence table on the bundled settings")
    p_table.add_argument("--id", required=True, choices=sorted(_table_defs()))
    p_table.add_argument(
        "--benchmark-nf",
        type=int,
        default=None,
        help="benchmark resolution (default 2^20; rheston 2^16)",
    )
    p_table.add_argument("--n-steps", type=int, default=200, help="rheston Adams time steps")
    p_table.add_argument("--out", default=None, help="output path (default stdout)")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.set_defaults(func=cmd_table)

    p_pdf = sub.add_parser("pdf", help="density and CDF of the return")
    _add_model_flags(p_pdf)
    _add_market_flags(p_pdf)
    p_pdf.add_argument("--nf", type=int, default=4096, help="even term count for the density")
    p_pdf.add_argument("--points", type=int, default=801, help="grid points across the range")
    p_pdf.add_argument("--with-cdf", action="store_true")
    p_pdf.add_argument("--xc", type=float, default=None, help="override truncation half-width")
    p_pdf.add_argument("--out", default=None, help="output path (default stdout)")
    p_pdf.set_defaults(func=cmd_pdf)

    p_sweep = sub.add_parser("beta-sweep", help="tune a damped-call engine's step multiplier")
    _add_model_flags(p_sweep)
    _add_market_flags(p_sweep)
    p_sweep.add_argument("--engine", required=True, choices=("lewis", "carrmadan"))
    p_sweep.add_argument("--nf", type=int, required=True, help="FFT size")
    p_sweep.add_argument("--betas", default="0.5:4.0:15", help="start:stop:count or comma list")
    p_sweep.add_argument("--epsilon", type=float, default=1.0)
    p_sweep.add_argument("--alpha-cm", type=float, default=0.4)
    p_sweep.add_argument("--surface", default=None, help="CSV of K,T rows (default synthetic)")
    p_sweep.add_argument(
        "--benchmark-nf", type=int, default=16384, help="reference digital-series resolution"
    )
    p_sweep.add_argument("--out", default=None, help="output path (default stdout)")
    p_sweep.set_defaults(func=cmd_beta_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, parser)
    except PricingError as exc:
        json.dump({"error": type(exc).__name__, "message": str(exc)}, sys.stderr)
        sys.stderr.write("\n")
        return _EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
