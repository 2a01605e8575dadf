"""sftlab: free parts and strong aperiodicity of subshifts of finite type.

Engines:
    groups      exact group arithmetic, cosets, conjugacy, roots
    sft         SFT specs, configurations, local-rule checks
    zengine     exact analysis of SFTs on Z (transition graph)
    gridengine  Wang tiles and periodic torus search on Z^2
    lift        coset decomposition, free-part transfer, fixed-point construction
    oracle      brute-force ground truth on finite groups
    cli         the ``sftlab`` command
"""

__version__ = "0.1.0"
