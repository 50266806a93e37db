"""Smoke test for the photon_switch extension module.

Build and install first:
    pip install --no-build-isolation ./crates/py
"""

import math

import photon_switch as ps


def close(a, b, tol):
    return abs(a - b) <= tol


def main():
    c = ps.SPEED_OF_LIGHT
    weak = ps.Cavity.from_q(1550e-9, 100e6, 500.0, 5e4, 1e9)
    strong = weak.with_coupling(2 * math.pi * 500e9)

    bare = ps.Layout([], [], 0.3 * c)
    t, r = ps.scattering(bare, 1.2e15)
    assert close(abs(t), 1.0, 1e-15) and abs(r) == 0.0

    single = ps.Layout.identical(weak, 1, 0.0, 0.3 * c)
    t, r = ps.scattering(single, weak.omega_c)
    assert abs(t) ** 2 < 0.01, t
    assert abs(t) ** 2 + abs(r) ** 2 <= 1.0

    reflect = ps.Layout.identical(weak, 3, 4.65e-6, 0.3 * c)
    transmit = ps.Layout.identical(strong, 3, 4.65e-6, 0.3 * c)
    packet = ps.WavePacket(1550e-9, 1e-9)
    m_r = ps.switch_metrics(reflect, packet, "reflection")
    m_t = ps.switch_metrics(transmit, packet, "transmission")
    assert close(m_r["efficiency"], 0.964, 0.002), m_r
    assert close(m_r["fidelity"], 0.977, 0.002), m_r
    assert close(m_t["efficiency"], 0.964, 0.002), m_t
    assert close(m_t["fidelity"], 0.974, 0.002), m_t

    assert close(ps.round_trip_time(reflect), 0.207e-12, 0.002e-12)

    sp = ps.spectrum(reflect, 1540.0, 1560.0, 201)
    assert len(sp["transmission"]) == 201
    assert all(0.0 <= x <= 1.0 for x in sp["transmission"])

    w = weak.omega_c + 3e11
    t_cascade, _ = ps.scattering(reflect, w)
    t_closed, _ = ps.chain_scattering(weak, 3, 4.65e-6, 0.3 * c, w)
    assert close(abs(t_cascade) ** 2, abs(t_closed) ** 2, 1e-9)

    ten = ps.Layout.identical(strong.with_coupling(2 * math.pi * 1e12), 10, 31.5e-6, 0.3 * c)
    faulty = ps.mitigate(ten, 6, "weak_coupling")
    fixed = ps.mitigate(faulty, 6, "decouple")
    at = lambda layout: abs(ps.scattering(layout, weak.omega_c)[0]) ** 2
    assert at(faulty) < 0.05 < 0.95 < at(fixed)

    a = ps.disorder_study(ten, "coupled_q", 500.0, 50.0, 20, 7, 1545.0, 1555.0, 101)
    b = ps.disorder_study(ten, "coupled_q", 500.0, 50.0, 20, 7, 1545.0, 1555.0, 101)
    assert a["mean"]["transmission"] == b["mean"]["transmission"]
    assert len(a["parameters"]) == 20

    try:
        ps.Layout.identical(ps.Cavity(1e15, 1e15, 1e9, 1e11, 1e11, 0.0, 0.0), 1, 0.0, c).validate()
    except ValueError:
        pass
    else:
        raise AssertionError("lossless emitter pole should fail validation")
    try:
        ps.switch_metrics(reflect, packet, "sideways")
    except ValueError:
        pass
    else:
        raise AssertionError("bad mode accepted")

    print(f"smoke test passed: E_r={m_r['efficiency']:.4f} F_r={m_r['fidelity']:.4f} "
          f"E_t={m_t['efficiency']:.4f} F_t={m_t['fidelity']:.4f}")


if __name__ == "__main__":
    main()
