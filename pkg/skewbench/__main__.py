from skewbench.cli import main

main()
