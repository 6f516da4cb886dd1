# Core numerics, exceptions and status tables
