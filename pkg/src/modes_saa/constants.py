SPEED_OF_LIGHT = 3e8  # m/s, rounded as in the link budget
CARRIER_HZ = 1090e6  # DF4 downlink carrier
