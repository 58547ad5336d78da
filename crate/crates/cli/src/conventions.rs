pub const CONVENTIONS: &str = "\
Conventions used by every command

QFI
  The QFI is the convex roof of the variance, I(X) = min Σ p_n Var_n(X).
  This is one quarter of the metrological quantum Fisher information F_Q;
  for pure states I(X) = Var(X).

Quadratures
  X_ϑ = e^{iϑ} a + e^{-iϑ} a†, so x = a + a†, p = i(a† - a), [x, p] = 2i.
  Vacuum and coherent states have Var X_ϑ = 1 and I = 1 per mode.
  Phase-space states are normalized by the number of modes:
  N_eff = max_ϑ I(X_ϑ) / modes.

Spins
  Collective generators are 2 n·J = Σ_i n·σ_i (Pauli units). A coherent
  spin state has I = N, a GHZ state N². N_eff = max_n I(2 n·J) / N.
  Parity-fringe records use the rotation exp(-iθ n·J), i.e. the
  generator 2 n·J runs for θ/2.

Squeezing in decibels
  Photonic modes: dB relative to vacuum noise, N_eff ≥ 10^{dB/10}.
  Spins: dB of the Wineland parameter relative to a coherent spin
  state, N_eff ≥ 1/ξ² = 10^{dB/10}. Positive dB means squeezing unless
  --negative-is-squeezed is given; the reference must match --system.

Records
  wigner_cut: displaced parity W(θ) = <Π> after exp(-iθ X_ϑ), values in [-1, 1].
  parity_fringe: product parity after a collective rotation by θ.
  fock_histogram_pair: two normalized histograms, delta_theta apart.
  Settings of a uniform grid are integer multiples of theta0.

Intervals
  One-sigma equivalent: the 16th to 84th percentile. A bound is
  significant when the lower end of its interval is above zero.
";
