def _row(*pairs):
    cells = ''.join(f'{label + ":":<24}{str(value):<20}' for label, value in pairs)
    print('  ' + cells)


def print_args(config, args=None):
    if args is not None:
        print("\033[1m" + "Basic Config" + "\033[0m")
        _row(("Verb", args.verb), ("Config", args.config))
        _row(("Preset", config.preset), ("Workers", config.workers))
        _row(("Output Dir", config.output_dir))
        print()

    motor = config.system.motor
    print("\033[1m" + "Motor" + "\033[0m")
    _row(("R_s [Ohm]", motor.R_s), ("R_r [Ohm]", motor.R_r))
    _row(("L_ss [H]", motor.L_ss), ("L_rr [H]", motor.L_rr))
    _row(("L_ms [H]", motor.L_ms), ("Pole Pairs", motor.pole_pairs))
    _row(("Supply [V]", motor.supply_amplitude_V), ("Supply [Hz]", motor.supply_frequency_Hz))
    print()

    mech = config.system.mech
    print("\033[1m" + "Mechanical" + "\033[0m")
    _row(("m_p [kg]", mech.m_p), ("m_g [kg]", mech.m_g))
    _row(("K_yp [N/m]", mech.K_yp), ("K_yg [N/m]", mech.K_yg))
    _row(("C_yp [Ns/m]", mech.C_yp), ("C_yg [Ns/m]", mech.C_yg))
    _row(("i_m [kgm2]", mech.i_m), ("i_p [kgm2]", mech.i_p))
    _row(("i_g [kgm2]", mech.i_g), ("K_t [Nm/rad]", mech.K_t))
    _row(("C_t [Nms/rad]", mech.C_t), ("B_v [Nms/rad]", mech.B_v))
    _row(("r_p [m]", f'{mech.r_p:.6g}'), ("r_g [m]", f'{mech.r_g:.6g}'))
    _row(("M_p [Nm]", mech.M_p), ("M_g [Nm]", mech.M_g))
    _row(("Mesh Zeta", mech.zeta))
    print()

    geometry = config.system.geometry
    print("\033[1m" + "Gear Geometry" + "\033[0m")
    _row(("Teeth Pinion", geometry.teeth_pinion), ("Teeth Gear", geometry.teeth_gear))
    _row(("Module [mm]", geometry.module_mm), ("Face Width [m]", geometry.face_width_m))
    _row(("Contact Ratio", f'{geometry.contact_ratio:.4f}'), ("Mesh Freq [Hz]", f'{config.system.mesh_frequency_Hz:.1f}'))
    _row(("Profile Samples", config.system.profile_samples))
    print()

    sim = config.simulation
    print("\033[1m" + "Simulation" + "\033[0m")
    _row(("Sample Rate [Hz]", sim.sample_rate_Hz), ("Duration [s]", sim.duration_s))
    _row(("Transient [s]", sim.transient_s), ("Substeps", sim.substeps))
    _row(("Channel", sim.channel), ("Master Seed", config.master_seed))
    print()

    print("\033[1m" + "Experiment Matrix" + "\033[0m")
    for sl in config.speed_loads:
        _row(("Speed-Load", sl.name), ("Shaft [Hz]", sl.shaft_frequency_Hz))
        _row(("", ""), ("Load [Nm]", f'{sl.load_torque_Nm:.4f}'))
    crack_levels = ', '.join(f'{c:g}' for c in config.crack_levels)
    snr_levels = ', '.join(f'{s:g}' for s in config.snr_levels_db)
    _row(("Crack Levels", crack_levels), ("SNR Levels [dB]", snr_levels))
    _row(("Cases", len(config.cases())), ("Simulations", len(config.simulations())))
    print()

    vmd = config.vmd
    print("\033[1m" + "VMD / TSA / Chaos" + "\033[0m")
    _row(("K", vmd.K), ("Alpha", vmd.alpha))
    _row(("Tau", vmd.tau), ("Eps", vmd.eps))
    _row(("Max Iters", vmd.max_iters), ("Init", vmd.init))
    _row(("TSA Period", config.tsa.period_source), ("Theiler Window", config.chaos.theiler_window))
    _row(("m", config.chaos.m), ("d", config.chaos.d))
    print()
