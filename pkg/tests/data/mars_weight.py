def main():
    # ask the user for a weight on earth
    weight = input("Enter a weight on earth:")
    weight_str = float(weight)

    z = weight_str * 0.378
    s = str(z)

    print("The equivalent weight on Mars is " + s)
