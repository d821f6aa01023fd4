from prefteam.cli import main

main()
